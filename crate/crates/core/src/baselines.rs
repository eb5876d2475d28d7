//! Comparator estimators.
//!
//! [`integer_only`] keeps just the integer part of the pilot peak, so its
//! delay error floors at the fractional quantisation error. [`two_d_search`]
//! fits the exact effective-channel column of the pilot to the received
//! pilot region with a downhill simplex over `(L, K)`.

use serde::{Deserialize, Serialize};

use crate::channel::LosChannel;
use crate::effective::EffectiveChannel;
use crate::error::Result;
use crate::estimator::{integer_estimate, pilot_response, pspr, Estimate, EstimateFlags};
use crate::frame::DaftFrame;
use crate::grid::AfdmGrid;
use crate::search::nelder_mead_2d;
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    IntegerOnly,
    TwoDSearch,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 2] = [BaselineKind::IntegerOnly, BaselineKind::TwoDSearch];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::IntegerOnly => "integer-only",
            BaselineKind::TwoDSearch => "two-d-search",
        }
    }
}

/// Integer estimate on the uncompensated demodulated frame, fractional
/// parts set to zero.
pub fn integer_only(y: &DaftFrame, grid: &AfdmGrid) -> Result<Estimate> {
    let int = integer_estimate(y, grid)?;
    Ok(Estimate {
        l_hat: int.l_hat,
        k_hat: int.k_hat,
        kappa_hat: 0.0,
        iota_hat: 0.0,
        pspr: pspr(y.symbols(), int.m_peak, grid),
        m_peak: int.m_peak,
        flags: EstimateFlags { ambiguous: int.ambiguous, near_integer: true },
    })
}

/// Result of the simplex fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoDEstimate {
    pub delay: f64,
    pub doppler: f64,
    /// Normalised correlation at the optimum, in `[0, 1]`.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl TwoDEstimate {
    pub fn to_estimate(&self, m_peak: i64) -> Estimate {
        let l = self.delay.floor();
        let k = self.doppler.floor();
        Estimate {
            l_hat: l as i64,
            k_hat: k as i64,
            kappa_hat: self.doppler - k,
            iota_hat: self.delay - l,
            pspr: f64::NAN,
            m_peak,
            flags: EstimateFlags { ambiguous: !self.converged, near_integer: false },
        }
    }
}

/// Normalised correlation between the pilot region of `y` and the pilot
/// column of the effective channel for `(delay, doppler)`.
pub fn correlation_objective(eff: &EffectiveChannel, y: &DaftFrame, delay: f64, doppler: f64) -> f64 {
    let grid = eff.grid();
    let model = eff.h_eff_column(&LosChannel::ideal(delay.max(0.0), doppler), 0);
    let (mut dot, mut my, mut mm) = (Complex64::default(), 0.0, 0.0);
    for d in grid.pilot_region() {
        let a = pilot_response(y.symbols(), d);
        let b = pilot_response(&model, d);
        dot += a.conj() * b;
        my += a.norm_sqr();
        mm += b.norm_sqr();
    }
    if my == 0.0 || mm == 0.0 {
        return 0.0;
    }
    dot.norm() / (my * mm).sqrt()
}

/// Simplex search over `[0, l_max] x [-k_max, k_max]` from `init`
/// (`(delay, doppler)`), stopping when the simplex diameter is below
/// `1e-3` or after 200 iterations.
pub fn two_d_search(eff: &EffectiveChannel, y: &DaftFrame, init: (f64, f64)) -> TwoDEstimate {
    let grid = eff.grid();
    let (l_max, k_max) = (grid.l_max() as f64, grid.k_max() as f64);
    let r = nelder_mead_2d(
        |p| -correlation_objective(eff, y, p[0], p[1]),
        [init.0, init.1],
        [0.5, 0.5],
        [0.0, -k_max],
        [l_max, k_max],
        1e-3,
        200,
    );
    TwoDEstimate {
        delay: r.point[0],
        doppler: r.point[1],
        objective: -r.value,
        iterations: r.iterations,
        converged: r.converged,
    }
}

/// [`two_d_search`] started from the integer estimate.
pub fn two_d_from_integer(eff: &EffectiveChannel, y: &DaftFrame) -> Result<Estimate> {
    let int = integer_estimate(y, eff.grid())?;
    let fit = two_d_search(eff, y, (int.l_hat as f64, int.k_hat as f64));
    Ok(fit.to_estimate(int.m_peak))
}
