use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EstimatorKind, ExperimentConfig};
use super::report::{RmseReport, RmseRow};
use crate::baselines::{integer_only, two_d_from_integer};
use crate::channel::{apply_los_channel, FirDelayModel, LosChannel};
use crate::effective::{elg_curve, EffectiveChannel, ElgTable};
use crate::error::Result;
use crate::estimator::{build_pilot_frame, joint_estimate, DataFill, Estimate, PilotLayout, SearchConfig};
use crate::frame::TimeFrame;
use crate::grid::AfdmGrid;
use crate::math::cis;
use crate::transform::{append_cpp, strip_cpp, Daft};
use crate::Complex64;

/// True channel of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub delay: f64,
    pub doppler: f64,
    pub gain: Complex64,
}

/// Channel and per-frame seeds of one trial. Depends only on the master
/// seed and the trial index, so every grid point reuses the same draw.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialDraw {
    pub truth: Truth,
    /// `(data_seed, noise_seed)` per frame.
    pub frame_seeds: Vec<(u64, u64)>,
}

impl TrialDraw {
    pub fn new(cfg: &ExperimentConfig, trial_index: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.master_seed);
        rng.set_stream(trial_index);
        let delay = rng.gen_range(0.0..=cfg.l_max as f64);
        let k_max = cfg.k_max as f64;
        let doppler = rng.gen_range(-k_max..=k_max);
        let gain = cis(rng.gen::<f64>());
        let frame_seeds = (0..cfg.estimates_per_trial).map(|_| (rng.gen(), rng.gen())).collect();
        Self { truth: Truth { delay, doppler, gain }, frame_seeds }
    }
}

/// One `(SNR, E_p/E_i)` operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub snr_db: f64,
    pub ep_ei_db: f64,
}

/// Per-grid state shared by all trials.
pub struct Scenario {
    cfg: ExperimentConfig,
    grid: AfdmGrid,
    daft: Daft,
    eff: EffectiveChannel,
    table: ElgTable,
    search: SearchConfig,
    guard: usize,
}

impl Scenario {
    pub fn new(cfg: &ExperimentConfig, grid: AfdmGrid) -> Result<Self> {
        Ok(Self {
            cfg: cfg.clone(),
            daft: Daft::new(&grid),
            eff: EffectiveChannel::new(&grid),
            table: elg_curve(&grid),
            search: cfg.search()?,
            guard: cfg.guard_for(&grid),
            grid,
        })
    }

    pub fn grid(&self) -> &AfdmGrid {
        &self.grid
    }

    pub fn layout(&self, point: &Point) -> PilotLayout {
        PilotLayout::with_guard(point.ep_ei_db, self.guard)
    }

    /// Noise variance giving `snr_db` for a frame with pilot-to-data ratio
    /// `ep_ei_db`: mean transmitted power per sample over `sigma^2`.
    pub fn noise_var(&self, point: &Point) -> f64 {
        let layout = self.layout(point);
        let n = self.grid.n();
        let power = (layout.pilot_amplitude.powi(2) + layout.data_len(n) as f64) / n as f64;
        power / 10f64.powf(point.snr_db / 10.0)
    }

    /// Prefix-free received frames of one trial.
    pub fn received(&self, draw: &TrialDraw, point: &Point) -> Result<Vec<TimeFrame>> {
        let layout = self.layout(point);
        let t = draw.truth;
        let ch = LosChannel::new(t.gain, t.delay, t.doppler, self.noise_var(point))?;
        let fir = FirDelayModel::with_shape(ch.frac_delay(), self.cfg.fir_half_width, self.cfg.tap_shape, &self.grid)?;
        draw.frame_seeds
            .iter()
            .map(|&(data_seed, noise_seed)| {
                let x = build_pilot_frame(&self.grid, &layout, DataFill::Qpsk, data_seed)?;
                let s = append_cpp(&self.daft.modulate(&x)?, &self.grid)?;
                strip_cpp(&apply_los_channel(&s, &ch, &fir, &self.grid, noise_seed)?)
            })
            .collect()
    }

    pub fn estimate(&self, kind: EstimatorKind, r: &TimeFrame) -> Result<Estimate> {
        match kind {
            EstimatorKind::Proposed => joint_estimate(r, &self.daft, &self.search, &self.table),
            EstimatorKind::IntegerOnly => integer_only(&self.daft.demodulate(r)?, &self.grid),
            EstimatorKind::TwoDSearch => two_d_from_integer(&self.eff, &self.daft.demodulate(r)?),
        }
    }
}

/// Truth and per-frame estimates of every configured estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub truth: Truth,
    pub estimates: Vec<(EstimatorKind, Vec<Estimate>)>,
}

pub fn run_trial(scenario: &Scenario, point: &Point, trial_index: u64) -> Result<TrialOutcome> {
    let draw = TrialDraw::new(&scenario.cfg, trial_index);
    let frames = scenario.received(&draw, point)?;
    let estimates = scenario
        .cfg
        .estimators
        .iter()
        .map(|&kind| Ok((kind, frames.iter().map(|r| scenario.estimate(kind, r)).collect::<Result<_>>()?)))
        .collect::<Result<_>>()?;
    Ok(TrialOutcome { truth: draw.truth, estimates })
}

/// Doppler error on the circle: the smallest of `e`, `e - 1`, `e + 1` in
/// magnitude.
pub fn circular_error(e: f64) -> f64 {
    [e, e - 1.0, e + 1.0].into_iter().min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap()
}

/// Scored errors of one trial: `(delay, doppler, pspr)` per sample.
fn score(truth: &Truth, estimates: &[Estimate], average: bool) -> Vec<(f64, f64, f64)> {
    if average {
        let n = estimates.len() as f64;
        let delay = estimates.iter().map(Estimate::delay).sum::<f64>() / n;
        let doppler = estimates.iter().map(Estimate::doppler).sum::<f64>() / n;
        let pspr = estimates.iter().map(|e| e.pspr).sum::<f64>() / n;
        vec![(delay - truth.delay, circular_error(doppler - truth.doppler), pspr)]
    } else {
        estimates
            .iter()
            .map(|e| (e.delay() - truth.delay, circular_error(e.doppler() - truth.doppler), e.pspr))
            .collect()
    }
}

/// RMSE and its delta-method standard error.
fn rmse_with_se(errors: &[f64]) -> (f64, f64) {
    let n = errors.len() as f64;
    let sq: Vec<f64> = errors.iter().map(|e| e * e).collect();
    let mse = sq.iter().sum::<f64>() / n;
    let rmse = mse.sqrt();
    if errors.len() < 2 || rmse == 0.0 {
        return (rmse, 0.0);
    }
    let var = sq.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / (n - 1.0);
    (rmse, (var / n).sqrt() / (2.0 * rmse))
}

/// Runs every `(C, E_p/E_i, SNR, estimator)` combination of `cfg`.
///
/// Trials run in parallel and are reduced in trial order, so the report
/// does not depend on the thread count.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<RmseReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let draws: Vec<TrialDraw> = (0..cfg.trials as u64).map(|t| TrialDraw::new(cfg, t)).collect();
    for grid in cfg.grids()? {
        let scenario = Scenario::new(cfg, grid)?;
        for &ep_ei_db in &cfg.ep_ei_db {
            for &snr_db in &cfg.snr_db {
                let point = Point { snr_db, ep_ei_db };
                let frames: Vec<Vec<TimeFrame>> =
                    draws.par_iter().map(|d| scenario.received(d, &point)).collect::<Result<_>>()?;
                for &kind in &cfg.estimators {
                    let start = Instant::now();
                    let scored: Vec<Vec<(f64, f64, f64)>> = draws
                        .par_iter()
                        .zip(&frames)
                        .map(|(d, fs)| {
                            let est = fs.iter().map(|r| scenario.estimate(kind, r)).collect::<Result<Vec<_>>>()?;
                            Ok(score(&d.truth, &est, cfg.average_estimates))
                        })
                        .collect::<Result<_>>()?;
                    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                    let flat: Vec<(f64, f64, f64)> = scored.into_iter().flatten().collect();
                    let de: Vec<f64> = flat.iter().map(|s| s.0).collect();
                    let dk: Vec<f64> = flat.iter().map(|s| s.1).collect();
                    let finite: Vec<f64> = flat.iter().map(|s| s.2).filter(|p| p.is_finite()).collect();
                    let mean_pspr = (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64);
                    let (delay_rmse, delay_rmse_se) = rmse_with_se(&de);
                    let (doppler_rmse, doppler_rmse_se) = rmse_with_se(&dk);
                    rows.push(RmseRow {
                        estimator: kind,
                        snr_db,
                        ep_ei_db,
                        c: scenario.grid().segments(),
                        delay_rmse,
                        doppler_rmse,
                        trials: cfg.trials,
                        mean_pspr,
                        wall_ms,
                        delay_rmse_se,
                        doppler_rmse_se,
                    });
                }
            }
        }
    }
    Ok(RmseReport::new(cfg.clone(), rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            trials: 4,
            estimates_per_trial: 2,
            snr_db: vec![20.0],
            ..Default::default()
        }
    }

    #[test]
    fn draws_are_reproducible_and_distinct() {
        let cfg = small();
        assert_eq!(TrialDraw::new(&cfg, 3), TrialDraw::new(&cfg, 3));
        assert_ne!(TrialDraw::new(&cfg, 3).truth, TrialDraw::new(&cfg, 4).truth);
        let t = TrialDraw::new(&cfg, 9).truth;
        assert!((0.0..=3.0).contains(&t.delay) && t.doppler.abs() <= 3.0);
        assert!((t.gain.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_free_trial_meets_estimator_tolerances() {
        let cfg = ExperimentConfig { snr_db: vec![400.0], ..small() };
        let sc = Scenario::new(&cfg, cfg.grids().unwrap().remove(0)).unwrap();
        // a strong pilot keeps data leakage into the pilot bins negligible
        let point = Point { snr_db: 400.0, ep_ei_db: 40.0 };
        for trial in 0..4 {
            let out = run_trial(&sc, &point, trial).unwrap();
            let (kind, est) = &out.estimates[0];
            assert_eq!(*kind, EstimatorKind::Proposed);
            for e in est {
                assert!((e.delay() - out.truth.delay).abs() < 2e-2, "{e:?} {:?}", out.truth);
                assert!(circular_error(e.doppler() - out.truth.doppler).abs() < 5e-3, "{e:?} {:?}", out.truth);
            }
        }
    }

    #[test]
    fn noise_var_matches_definition() {
        let cfg = small();
        let sc = Scenario::new(&cfg, cfg.grids().unwrap().remove(0)).unwrap();
        let v = sc.noise_var(&Point { snr_db: 10.0, ep_ei_db: 10.0 });
        assert!((v - (10.0 + 202.0) / 256.0 / 10.0).abs() < 1e-12);
    }

    #[test]
    fn circular_error_wraps() {
        assert_eq!(circular_error(0.2), 0.2);
        assert!((circular_error(0.97) + 0.03).abs() < 1e-12);
        assert!((circular_error(-0.99) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn rmse_and_error_bar() {
        let (r, se) = rmse_with_se(&[1.0, -1.0, 1.0, -1.0]);
        assert_eq!((r, se), (1.0, 0.0));
        let (r, se) = rmse_with_se(&[0.0, 2.0]);
        assert!((r - 2f64.sqrt()).abs() < 1e-12 && se > 0.0);
    }

    #[test]
    fn sweep_shape() {
        let cfg = ExperimentConfig {
            snr_db: vec![10.0, 30.0],
            ep_ei_db: vec![0.0, 10.0],
            segments: vec![10, 18],
            estimators: vec![EstimatorKind::Proposed, EstimatorKind::IntegerOnly],
            ..small()
        };
        let report = run_sweep(&cfg).unwrap();
        assert_eq!(report.rows.len(), 2 * 2 * 2 * 2);
        assert!(report.rows.iter().all(|r| r.trials == 4 && r.delay_rmse >= 0.0));
    }
}
