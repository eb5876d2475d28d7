//! Monte Carlo sweeps, validation checks and report output.
//!
//! A sweep draws one channel per trial (delay uniform on `[0, l_max]`,
//! Doppler uniform on `[-k_max, k_max]`, unit-modulus gain with random
//! phase), sends `estimates_per_trial` independent pilot frames through it
//! and scores the averaged estimates. The draw depends only on the master
//! seed and the trial index, so every SNR, pilot-energy and `C` point sees
//! the same channels.

mod config;
mod profile;
mod report;
mod sweep;
mod validate;

pub use config::{EstimatorKind, ExperimentConfig};
pub use profile::{write_elg_csv, write_profile_csv};
pub use report::{csv_without_wall_time, RmseReport, RmseRow, CSV_HEADER, SCHEMA_VERSION};
pub use sweep::{circular_error, run_sweep, run_trial, Point, Scenario, TrialDraw, TrialOutcome, Truth};
pub use validate::{
    channel_model_error, channel_model_sweep, envelope_check, integer_channel_check, random_params, validate_mode,
    CheckResult, FidelitySummary, ValidationReport,
};
