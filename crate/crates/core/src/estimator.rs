//! Pilot-aided joint estimator.
//!
//! The receiver strips the prefix, then:
//!
//! 1. searches the Doppler compensation `kappa_comp` in `[0, 1)` that
//!    maximises the peak-to-sidelobe power ratio (PSPR) of the demodulated
//!    pilot response ([`estimate_kappa`]);
//! 2. decodes the integer delay and Doppler from the peak of the
//!    compensated response ([`integer_estimate`]);
//! 3. inverts the early-late gate factor between the two integer-delay taps
//!    that bracket the true delay ([`estimate_iota`]).
//!
//! Pilot responses are indexed by the equivalent delay `d`: the pilot sent
//! on chirp 0 through integer delay `l` and Doppler `k` shows up at DAFT
//! index `(-d) mod N` with `d = k + C l`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::effective::{ElgTable, ELG_IOTA_MAX, ELG_IOTA_MIN};
use crate::error::{AfdmError, Result};
use crate::frame::{DaftFrame, TimeFrame};
use crate::grid::AfdmGrid;
use crate::math::cis;
use crate::search::golden_section_max;
use crate::transform::Daft;
use crate::Complex64;

/// Pilot and guard placement in the DAFT domain.
///
/// Chirp 0 carries the pilot, chirps `1 ..= Q` and `N-Q+1 ..= N-1` are
/// zero and chirps `Q+1 ..= N-Q` carry unit-energy QPSK data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PilotLayout {
    pub pilot_amplitude: f64,
    pub guard_width: usize,
}

impl PilotLayout {
    /// Layout with pilot-to-data energy ratio `ep_ei_db` (dB) and the grid's
    /// guard width.
    pub fn new(grid: &AfdmGrid, ep_ei_db: f64) -> Self {
        Self::with_guard(ep_ei_db, grid.guard())
    }

    /// Layout with an explicit guard width.
    pub fn with_guard(ep_ei_db: f64, guard_width: usize) -> Self {
        Self { pilot_amplitude: 10f64.powf(ep_ei_db / 20.0), guard_width }
    }

    pub fn pilot_index(&self) -> usize {
        0
    }

    /// Chirp indices carrying data.
    pub fn data_indices(&self, n: usize) -> std::ops::RangeInclusive<usize> {
        self.guard_width + 1..=n - self.guard_width
    }

    pub fn data_len(&self, n: usize) -> usize {
        n - 2 * self.guard_width
    }

    fn check(&self, n: usize) -> Result<()> {
        if 2 * self.guard_width >= n {
            return Err(AfdmError::InvalidParameter(format!(
                "guard width {} leaves no room in a {n}-chirp frame",
                self.guard_width
            )));
        }
        Ok(())
    }
}

/// What fills the data chirps of a pilot frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DataFill {
    /// Unit-energy QPSK, `(+-1 +- i) / sqrt 2`.
    #[default]
    Qpsk,
    Zeros,
}

/// Builds a pilot frame; QPSK data are drawn from a generator seeded with
/// `seed`.
pub fn build_pilot_frame(grid: &AfdmGrid, layout: &PilotLayout, data: DataFill, seed: u64) -> Result<DaftFrame> {
    let n = grid.n();
    layout.check(n)?;
    let mut x = DaftFrame::zeros(n);
    x.symbols_mut()[layout.pilot_index()] = Complex64::new(layout.pilot_amplitude, 0.0);
    if data == DataFill::Qpsk {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let a = std::f64::consts::FRAC_1_SQRT_2;
        for m in layout.data_indices(n) {
            let re = if rng.gen::<bool>() { a } else { -a };
            let im = if rng.gen::<bool>() { a } else { -a };
            x.symbols_mut()[m] = Complex64::new(re, im);
        }
    }
    Ok(x)
}

/// Demodulated sample at equivalent delay `d`, i.e. `y[(-d) mod N]`.
pub fn pilot_response(y: &[Complex64], d: i64) -> Complex64 {
    let n = y.len() as i64;
    y[(-d).rem_euclid(n) as usize]
}

/// Integer delay and Doppler read off the pilot peak.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerEstimate {
    pub l_hat: i64,
    pub k_hat: i64,
    /// Equivalent delay of the peak.
    pub m_peak: i64,
    /// The residue fell outside `|k| <= k_max` or the delay outside
    /// `0 ..= l_max`; the reported values are clamped.
    pub ambiguous: bool,
}

/// Splits an equivalent delay `d = k + C l` into `(l, k)`.
pub fn decode_equivalent_delay(grid: &AfdmGrid, d: i64) -> IntegerEstimate {
    let c = grid.segments() as i64;
    let l = (d as f64 / c as f64).round() as i64;
    let k = d - c * l;
    let k_max = grid.k_max() as i64;
    let l_max = grid.l_max() as i64;
    let ambiguous = k.abs() > k_max || l < 0 || l > l_max;
    IntegerEstimate {
        l_hat: l.clamp(0, l_max),
        k_hat: k.clamp(-k_max, k_max),
        m_peak: d,
        ambiguous,
    }
}

fn peak_in_region(y: &[Complex64], grid: &AfdmGrid) -> i64 {
    grid.pilot_region()
        .fold((0, f64::NEG_INFINITY), |best, d| {
            let p = pilot_response(y, d).norm_sqr();
            if p > best.1 {
                (d, p)
            } else {
                best
            }
        })
        .0
}

/// Integer estimate from the strongest bin of the pilot region.
pub fn integer_estimate(y: &DaftFrame, grid: &AfdmGrid) -> Result<IntegerEstimate> {
    y.expect_len(grid.n())?;
    Ok(decode_equivalent_delay(grid, peak_in_region(y.symbols(), grid)))
}

/// `r[n] exp(i 2 pi kappa_comp n / N)` on a prefix-free frame.
pub fn compensate(r: &TimeFrame, kappa_comp: f64) -> Result<TimeFrame> {
    if r.cpp_len() != 0 {
        return Err(AfdmError::PrefixPresent(r.cpp_len()));
    }
    let mut out = r.samples().to_vec();
    compensate_in_place(&mut out, kappa_comp);
    Ok(TimeFrame::body(out))
}

fn compensate_in_place(r: &mut [Complex64], kappa_comp: f64) {
    let n = r.len() as f64;
    for (i, v) in r.iter_mut().enumerate() {
        *v *= cis(kappa_comp * i as f64 / n);
    }
}

/// Settings of the fractional Doppler search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub coarse_points: usize,
    pub refine_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { coarse_points: 64, refine_tol: 1e-3 }
    }
}

impl SearchConfig {
    pub fn new(coarse_points: usize, refine_tol: f64) -> Result<Self> {
        if coarse_points < 16 {
            return Err(AfdmError::InvalidParameter(format!(
                "coarse grid needs at least 16 points, got {coarse_points}"
            )));
        }
        if !(refine_tol > 0.0 && refine_tol < 0.1) {
            return Err(AfdmError::InvalidParameter(format!("refine tolerance {refine_tol} outside (0, 0.1)")));
        }
        Ok(Self { coarse_points, refine_tol })
    }
}

/// Offsets of the `C`-bin PSPR window around the peak.
fn pspr_window(c: usize) -> std::ops::Range<i64> {
    let half = (c / 2) as i64;
    -half..c as i64 - half
}

/// Peak power over `1/C` times the summed power of the other bins in the
/// `C`-bin window around equivalent delay `m_peak`. Returns `+inf` when the
/// window holds no other energy.
pub fn pspr(y: &[Complex64], m_peak: i64, grid: &AfdmGrid) -> f64 {
    let c = grid.segments();
    let peak = pilot_response(y, m_peak).norm_sqr();
    let side: f64 = pspr_window(c)
        .filter(|&o| o != 0)
        .map(|o| pilot_response(y, m_peak + o).norm_sqr())
        .sum();
    if side == 0.0 {
        return f64::INFINITY;
    }
    peak / (side / c as f64)
}

/// Output of the fractional Doppler search.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaSearch {
    pub kappa_hat: f64,
    /// Equivalent delay of the peak after compensation.
    pub m_peak: i64,
    pub pspr: f64,
    /// Demodulated frame compensated by `kappa_hat`.
    pub y_tilde: DaftFrame,
}

struct Probe<'a> {
    daft: &'a Daft,
    r: &'a [Complex64],
    buf: Vec<Complex64>,
}

impl Probe<'_> {
    fn demod(&mut self, kappa: f64) -> Vec<Complex64> {
        self.buf.copy_from_slice(self.r);
        compensate_in_place(&mut self.buf, kappa);
        self.daft.demodulate_samples(&self.buf)
    }

    fn score(&mut self, kappa: f64) -> (f64, i64) {
        let y = self.demod(kappa);
        let g = self.daft.grid();
        let d = peak_in_region(&y, g);
        (pspr(&y, d, g), d)
    }
}

/// PSPR-maximising compensation over `[0, 1)`: coarse grid, then
/// golden-section refinement around the best grid point. The objective has
/// period one in `kappa_comp`, so the refinement may straddle 0.
pub fn estimate_kappa(r: &TimeFrame, daft: &Daft, cfg: &SearchConfig) -> Result<KappaSearch> {
    let n = daft.grid().n();
    if r.cpp_len() != 0 {
        return Err(AfdmError::PrefixPresent(r.cpp_len()));
    }
    if r.body_len() != n {
        return Err(AfdmError::LengthMismatch { expected: n, actual: r.body_len() });
    }
    let mut probe = Probe { daft, r: r.samples(), buf: vec![Complex64::default(); n] };
    let step = 1.0 / cfg.coarse_points as f64;
    let (best, _) = (0..cfg.coarse_points)
        .map(|i| i as f64 * step)
        .map(|k| (k, probe.score(k).0))
        .fold((0.0, f64::NEG_INFINITY), |b, (k, p)| if p > b.1 { (k, p) } else { b });
    let (kappa, _) = golden_section_max(|k| probe.score(k).0, best - step, best + step, cfg.refine_tol);
    let kappa_hat = kappa.rem_euclid(1.0);
    let y = probe.demod(kappa_hat);
    let m_peak = peak_in_region(&y, daft.grid());
    Ok(KappaSearch { kappa_hat, m_peak, pspr: pspr(&y, m_peak, daft.grid()), y_tilde: DaftFrame::new(y) })
}

/// Fractional delay from the early tap at equivalent delay `d_early` and
/// the late tap `C` bins further.
///
/// The factor is inverted through `table`. Factors more than 3 dB beyond
/// the table range take the near-integer path: `0.0` when the early tap
/// dominates and `1.0` when the late tap does. A zero magnitude at either
/// tap yields the clamped table endpoint instead.
pub fn estimate_iota(y: &DaftFrame, d_early: i64, grid: &AfdmGrid, table: &ElgTable) -> f64 {
    let e = pilot_response(y.symbols(), d_early).norm();
    let l = pilot_response(y.symbols(), d_early + grid.segments() as i64).norm();
    let early_wins = table.is_decreasing();
    if l == 0.0 || e == 0.0 {
        return if (l == 0.0) == early_wins { ELG_IOTA_MIN } else { ELG_IOTA_MAX };
    }
    let factor = 10.0 * e.log10() - 10.0 * l.log10();
    let (lo, hi) = table.range();
    if factor > hi + 3.0 {
        return if early_wins { 0.0 } else { 1.0 };
    }
    if factor < lo - 3.0 {
        return if early_wins { 1.0 } else { 0.0 };
    }
    table.invert(factor)
}

/// Conditions noticed while estimating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EstimateFlags {
    pub ambiguous: bool,
    pub near_integer: bool,
}

/// Joint estimate of delay `l_hat + iota_hat` and Doppler `k_hat + kappa_hat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub l_hat: i64,
    pub k_hat: i64,
    pub kappa_hat: f64,
    pub iota_hat: f64,
    pub pspr: f64,
    pub m_peak: i64,
    pub flags: EstimateFlags,
}

impl Estimate {
    pub fn delay(&self) -> f64 {
        self.l_hat as f64 + self.iota_hat
    }

    pub fn doppler(&self) -> f64 {
        self.k_hat as f64 + self.kappa_hat
    }
}

/// Full receiver chain on a prefix-free received frame.
pub fn joint_estimate(r: &TimeFrame, daft: &Daft, cfg: &SearchConfig, table: &ElgTable) -> Result<Estimate> {
    let grid = daft.grid();
    let c = grid.segments() as i64;
    let search = estimate_kappa(r, daft, cfg)?;
    let y = &search.y_tilde;
    let d_peak = search.m_peak;
    // both taps of the bracket must lie in the pilot region
    let region = grid.pilot_region();
    let left_ok = region.contains(&(d_peak - c));
    let right_ok = region.contains(&(d_peak + c));
    let left = pilot_response(y.symbols(), d_peak - c).norm();
    let right = pilot_response(y.symbols(), d_peak + c).norm();
    let d_early = if left_ok && (!right_ok || left > right) { d_peak - c } else { d_peak };
    let mut iota = estimate_iota(y, d_early, grid, table);
    let near_integer = iota == 0.0 || iota == 1.0;
    let mut d = d_early;
    if iota == 1.0 {
        d += c;
        iota = 0.0;
    }
    let int = decode_equivalent_delay(grid, d);
    Ok(Estimate {
        l_hat: int.l_hat,
        k_hat: int.k_hat,
        kappa_hat: search.kappa_hat,
        iota_hat: iota,
        pspr: search.pspr,
        m_peak: d_peak,
        flags: EstimateFlags { ambiguous: int.ambiguous, near_integer },
    })
}
