//! Waveform constants of one AFDM frame.

use serde::{Deserialize, Serialize};

use crate::error::{AfdmError, Result};
use crate::math::cis;
use crate::Complex64;

/// Constants shared by the transmitter, channel and receiver.
///
/// Delay and Doppler are normalised to one sample and one subcarrier spacing,
/// so the continuous-time chirp rate equals `c1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AfdmGrid {
    n: usize,
    k_max: usize,
    eta_v: usize,
    segments: usize,
    c1: f64,
    c2: f64,
    l_max: usize,
    n_cp: usize,
    guard: usize,
}

impl AfdmGrid {
    /// Builds a grid with `C = 2 k_max + eta_v` chirp segments.
    pub fn new(
        n: usize,
        k_max: usize,
        eta_v: usize,
        c2: f64,
        l_max: usize,
        n_cp: usize,
    ) -> Result<Self> {
        if n < 8 {
            return Err(AfdmError::InvalidParameter(format!("N = {n} must be at least 8")));
        }
        let segments = 2 * k_max + eta_v;
        if segments < 1 {
            return Err(AfdmError::InvalidParameter(
                "segment count C = 2 k_max + eta_v must be at least 1".into(),
            ));
        }
        if !c2.is_finite() {
            return Err(AfdmError::InvalidParameter(format!("c2 = {c2} is not finite")));
        }
        if n_cp < l_max {
            return Err(AfdmError::InvalidParameter(format!(
                "prefix length {n_cp} shorter than maximum delay {l_max}"
            )));
        }
        let guard = 2 * l_max * k_max + 2 * k_max + l_max;
        if 2 * guard >= n {
            return Err(AfdmError::InvalidParameter(format!(
                "guard width Q = {guard} does not fit in N = {n} (need Q < N/2)"
            )));
        }
        Ok(Self {
            n,
            k_max,
            eta_v,
            segments,
            c1: segments as f64 / (2 * n) as f64,
            c2,
            l_max,
            n_cp,
            guard,
        })
    }

    /// Builds a grid from an explicit segment count `C`; `eta_v = C - 2 k_max`.
    pub fn with_segments(
        n: usize,
        k_max: usize,
        segments: usize,
        c2: f64,
        l_max: usize,
        n_cp: usize,
    ) -> Result<Self> {
        let eta_v = segments.checked_sub(2 * k_max).ok_or_else(|| {
            AfdmError::InvalidParameter(format!(
                "C = {segments} is smaller than 2 k_max = {}",
                2 * k_max
            ))
        })?;
        Self::new(n, k_max, eta_v, c2, l_max, n_cp)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn eta_v(&self) -> usize {
        self.eta_v
    }

    /// Number of chirp segments `C`.
    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn n_cp(&self) -> usize {
        self.n_cp
    }

    /// Guard width `Q` on each side of the pilot.
    pub fn guard(&self) -> usize {
        self.guard
    }

    /// Fractional part of `c1 n^2` in cycles, exact for any integer `n`.
    pub fn c1_cycles(&self, n: i64) -> f64 {
        let two_n = 2 * self.n as i128;
        let r = (self.segments as i128 * (n as i128) * (n as i128)).rem_euclid(two_n);
        r as f64 / two_n as f64
    }

    /// Fractional part of `c2 m^2` in cycles.
    pub fn c2_cycles(&self, m: i64) -> f64 {
        (self.c2 * (m * m) as f64).rem_euclid(1.0)
    }

    /// `exp(i 2 pi c1 n^2)`.
    pub fn c1_chirp(&self, n: i64) -> Complex64 {
        cis(self.c1_cycles(n))
    }

    /// `exp(i 2 pi c2 m^2)`.
    pub fn c2_chirp(&self, m: i64) -> Complex64 {
        cis(self.c2_cycles(m))
    }

    /// Row range of the received pilot response in pilot-relative
    /// (equivalent delay) coordinates: `-k_max ..= k_max + C l_max`.
    pub fn pilot_region(&self) -> std::ops::RangeInclusive<i64> {
        let k = self.k_max as i64;
        -k..=k + (self.segments * self.l_max) as i64
    }
}
