use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::channel::{oversampled_oracle, propagate, relative_rms, FirDelayModel, LosChannel, TapShape};
use crate::effective::{elg_curve, envelope_fidelity, EffectiveChannel, EnvelopeParams};
use crate::error::Result;
use crate::estimator::{build_pilot_frame, integer_estimate, pilot_response, DataFill, PilotLayout};
use crate::frame::DaftFrame;
use crate::grid::AfdmGrid;
use crate::transform::{append_cpp, strip_cpp, Daft};

/// Outcome of one validation check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Envelope agreement over random channels for one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelitySummary {
    pub draws: usize,
    pub peak_matches: usize,
    pub min_correlation: f64,
}

impl FidelitySummary {
    pub fn passed(&self) -> bool {
        self.peak_matches == self.draws && self.min_correlation > 0.99
    }
}

/// Random `(l, iota, k, kappa)` with `l <= l_max` and `|k| <= k_max`.
pub fn random_params<R: Rng>(grid: &AfdmGrid, rng: &mut R) -> EnvelopeParams {
    let k_max = grid.k_max() as i64;
    EnvelopeParams::new(
        rng.gen_range(0..=grid.l_max() as i64),
        rng.gen(),
        rng.gen_range(-k_max..=k_max),
        rng.gen(),
    )
}

/// Compares the closed-form envelope with the exact sum on the pilot
/// column for `draws` random channels.
pub fn envelope_check(grid: &AfdmGrid, draws: usize, seed: u64) -> FidelitySummary {
    let eff = EffectiveChannel::new(grid);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut peak_matches = 0;
    let mut min_correlation = f64::INFINITY;
    for _ in 0..draws {
        let f = envelope_fidelity(&eff, &random_params(grid, &mut rng), 0);
        peak_matches += f.peaks_agree() as usize;
        min_correlation = min_correlation.min(f.correlation);
    }
    FidelitySummary { draws, peak_matches, min_correlation }
}

/// Relative RMS between the FIR channel and the oversampled continuous-time
/// reference for frame `x`.
pub fn channel_model_error(
    grid: &AfdmGrid,
    x: &DaftFrame,
    ch: &LosChannel,
    half_width: usize,
    oversampling: usize,
    shape: TapShape,
) -> Result<f64> {
    let s = append_cpp(&Daft::new(grid).modulate(x)?, grid)?;
    let fir = FirDelayModel::with_shape(ch.frac_delay(), half_width, shape, grid)?;
    let via_fir = propagate(&s, ch, &fir, grid)?;
    let via_oracle = oversampled_oracle(x, grid, ch, oversampling)?;
    Ok(relative_rms(&via_oracle, &via_fir))
}

/// Mean FIR-vs-reference error at each `(W, O)` over `draws` random
/// channels with QPSK frames.
pub fn channel_model_sweep(
    grid: &AfdmGrid,
    settings: &[(usize, usize)],
    draws: usize,
    shape: TapShape,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let layout = PilotLayout::new(grid, 0.0);
    let cases: Vec<(DaftFrame, LosChannel)> = (0..draws)
        .map(|i| {
            let delay = rng.gen_range(0.0..grid.l_max() as f64);
            let k_max = grid.k_max() as f64;
            let ch = LosChannel::ideal(delay, rng.gen_range(-k_max..=k_max));
            Ok((build_pilot_frame(grid, &layout, DataFill::Qpsk, seed ^ i as u64)?, ch))
        })
        .collect::<Result<_>>()?;
    settings
        .iter()
        .map(|&(w, o)| {
            let total = cases
                .iter()
                .map(|(x, ch)| channel_model_error(grid, x, ch, w, o, shape))
                .sum::<Result<f64>>()?;
            Ok(total / draws as f64)
        })
        .collect()
}

/// Worst sidelobe-to-peak ratio and decode failures over all integer
/// channels `l <= l_max`, `|k| <= k_max`, plus the worst FIR-vs-reference
/// error on those channels.
pub fn integer_channel_check(grid: &AfdmGrid, oversampling: usize, shape: TapShape) -> Result<(f64, usize, f64)> {
    let daft = Daft::new(grid);
    let layout = PilotLayout::new(grid, 0.0);
    let pilot = build_pilot_frame(grid, &layout, DataFill::Zeros, 0)?;
    let data = build_pilot_frame(grid, &layout, DataFill::Qpsk, 5)?;
    let c = grid.segments() as i64;
    let k_max = grid.k_max() as i64;
    let (mut worst_ratio, mut failures, mut worst_rms) = (0.0f64, 0, 0.0f64);
    for l in 0..=grid.l_max() as i64 {
        for k in -k_max..=k_max {
            let ch = LosChannel::ideal(l as f64, k as f64);
            let fir = FirDelayModel::with_shape(0.0, 4, shape, grid)?;
            let s = append_cpp(&daft.modulate(&pilot)?, grid)?;
            let y = daft.demodulate(&strip_cpp(&propagate(&s, &ch, &fir, grid)?)?)?;
            let d = k + c * l;
            let peak = pilot_response(y.symbols(), d).norm();
            let side = (0..grid.n() as i64)
                .filter(|&e| e != d.rem_euclid(grid.n() as i64))
                .map(|e| pilot_response(y.symbols(), e).norm())
                .fold(0.0, f64::max);
            worst_ratio = worst_ratio.max(side / peak);
            let est = integer_estimate(&y, grid)?;
            if (est.l_hat, est.k_hat) != (l, k) || est.ambiguous {
                failures += 1;
            }
            worst_rms = worst_rms.max(channel_model_error(grid, &data, &ch, 4, oversampling, shape)?);
        }
    }
    Ok((worst_ratio, failures, worst_rms))
}

/// Runs every validation check for the configured grids.
pub fn validate_mode(cfg: &ExperimentConfig) -> Result<ValidationReport> {
    cfg.validate()?;
    let mut checks = Vec::new();
    for grid in cfg.grids()? {
        let c = grid.segments();

        let fid = envelope_check(&grid, cfg.validation_draws, cfg.master_seed);
        checks.push(CheckResult {
            name: format!("envelope-fidelity C={c}"),
            passed: fid.passed(),
            detail: format!(
                "peaks agree {}/{}, min correlation {:.4} (need all and > 0.99)",
                fid.peak_matches, fid.draws, fid.min_correlation
            ),
        });

        let settings = [(4, 4), (8, 8), (cfg.fir_half_width, cfg.oracle_oversampling)];
        let errs = channel_model_sweep(&grid, &settings, cfg.validation_draws, cfg.tap_shape, cfg.master_seed)?;
        let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
        let last = *errs.last().unwrap();
        let listing: Vec<String> =
            settings.iter().zip(&errs).map(|((w, o), e)| format!("(W={w},O={o}) {e:.3e}")).collect();
        checks.push(CheckResult {
            name: format!("fir-vs-oracle C={c}"),
            passed: decreasing && last < 1e-2,
            detail: format!("{}; need decreasing and final < 1e-2", listing.join(", ")),
        });

        let (ratio, failures, rms) = integer_channel_check(&grid, cfg.oracle_oversampling, cfg.tap_shape)?;
        checks.push(CheckResult {
            name: format!("integer-channel C={c}"),
            passed: ratio < 1e-9 && failures == 0 && rms < 1e-9,
            detail: format!("sidelobe/peak {ratio:.2e}, decode failures {failures}, FIR vs reference {rms:.2e}"),
        });

        let table = elg_curve(&grid);
        let mid = table.values()[table.iotas().iter().position(|&i| (i - 0.5).abs() < 1e-9).unwrap()];
        let round_trip = table
            .iotas()
            .iter()
            .zip(table.values())
            .map(|(&i, &v)| (table.invert(v) - i).abs())
            .fold(0.0, f64::max);
        checks.push(CheckResult {
            name: format!("elg-curve C={c}"),
            passed: mid.abs() < 1e-9 && table.is_strictly_monotone() && round_trip < 1e-3,
            detail: format!(
                "A(0.5) = {mid:.1e}, strictly monotone: {}, max round-trip error {round_trip:.1e}",
                table.is_strictly_monotone()
            ),
        });
    }
    Ok(ValidationReport { checks })
}
