//! AFDM (affine frequency division multiplexing) signal chain and a joint
//! fractional delay / fractional Doppler estimator for line-of-sight links.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`], [`frame`] and [`transform`] hold the waveform constants, the
//!   frame containers and the discrete affine Fourier transform (DAFT) with
//!   its chirp-periodic prefix.
//! * [`channel`] simulates a single-path channel with fractional delay and
//!   Doppler, AWGN, and a continuous-time reference that keeps the
//!   segment-wise spectrum wrapping of the chirp carriers.
//! * [`effective`] evaluates the DAFT-domain effective channel exactly and
//!   through its closed-form sinc envelope, and builds the early-late gate
//!   (ELG) curve.
//! * [`estimator`] is the pilot-aided estimator: integer decode, closed-loop
//!   PSPR search for the fractional Doppler, and ELG for the fractional delay.
//! * [`baselines`] holds the comparators (integer-only and a 2-D simplex search).
//! * [`harness`] runs Monte Carlo sweeps and validation checks and writes
//!   CSV/JSON reports.
//!
//! All delays are in samples and all Doppler shifts in subcarrier spacings.

pub mod baselines;
pub mod channel;
pub mod effective;
pub mod error;
pub mod estimator;
pub mod frame;
pub mod grid;
pub mod harness;
pub mod search;
pub mod transform;

mod math;

pub use error::{AfdmError, Result};
pub use frame::{DaftFrame, TimeFrame};
pub use grid::AfdmGrid;
pub use num_complex::Complex64;
