//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line with the
//! measured values and the tolerance it was judged against.

use std::time::{Duration, Instant};

use afdm::channel::{propagate, FirDelayModel, LosChannel, TapShape};
use afdm::effective::elg_curve;
use afdm::estimator::{build_pilot_frame, joint_estimate, DataFill, PilotLayout, SearchConfig};
use afdm::harness::{
    channel_model_sweep, circular_error, csv_without_wall_time, envelope_check, integer_channel_check, run_sweep,
    EstimatorKind, ExperimentConfig, RmseReport,
};
use afdm::transform::{append_cpp, strip_cpp, Daft};
use afdm::{AfdmGrid, Complex64, DaftFrame};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const UNITARITY_TOL: f64 = 1e-10;
const UNITARITY_TIME: Duration = Duration::from_secs(10);
const SIDELOBE_TOL: f64 = 1e-9;
const FIDELITY_CORR: f64 = 0.99;
const FIDELITY_TIME: Duration = Duration::from_secs(120);
const ORACLE_RMS_TOL: f64 = 1e-2;
const KAPPA_TOL: f64 = 5e-3;
const IOTA_TOL: f64 = 2e-2;
const FLOOR_RATIO: f64 = 3.0;
const SWEEP_TIME: Duration = Duration::from_secs(15 * 60);
const C_SPREAD: f64 = 2.0;
const PLATEAU_RATIO: f64 = 2.0;
const ELG_MID_TOL: f64 = 1e-9;
const ELG_ROUND_TRIP_TOL: f64 = 1e-3;

fn verdict(id: u32, pass: bool, text: String) {
    println!("criterion {id}: {} {text}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {text}");
}

fn grid(c: usize) -> AfdmGrid {
    AfdmGrid::with_segments(256, 3, c, std::f64::consts::SQRT_2, 3, 32).unwrap()
}

fn rows(report: &RmseReport, kind: EstimatorKind) -> Vec<&afdm::harness::RmseRow> {
    report.rows.iter().filter(|r| r.estimator == kind).collect()
}

#[test]
fn criterion_01_daft_unitarity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for n in [64, 256] {
        let g = AfdmGrid::new(n, 2, 2, std::f64::consts::SQRT_2, 2, 16).unwrap();
        let daft = Daft::new(&g);
        for _ in 0..100 {
            let x = DaftFrame::new(
                (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            );
            let back = daft.demodulate(&daft.modulate(&x).unwrap()).unwrap();
            let err = back.symbols().iter().zip(x.symbols()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            worst = worst.max(err);
        }
    }
    let took = start.elapsed();
    verdict(
        1,
        worst < UNITARITY_TOL && took < UNITARITY_TIME,
        format!("max |demod(mod(x)) - x| = {worst:.2e} (< {UNITARITY_TOL:e}), {took:.2?} (< 10 s)"),
    );
}

#[test]
fn criterion_02_integer_channel_exactness() {
    let mut worst_ratio = 0.0f64;
    let mut failures = 0;
    for c in [8, 10, 18, 26] {
        let (ratio, fail, _) = integer_channel_check(&grid(c), 1, TapShape::Baseband).unwrap();
        worst_ratio = worst_ratio.max(ratio);
        failures += fail;
    }
    verdict(
        2,
        worst_ratio < SIDELOBE_TOL && failures == 0,
        format!(
            "l <= 3, |k| <= 3, C in {{8,10,18,26}}: worst sidelobe/peak {worst_ratio:.2e} (< {SIDELOBE_TOL:e}), decode failures {failures}"
        ),
    );
}

#[test]
fn criterion_03_envelope_fidelity() {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for c in [8, 10, 18, 26] {
        let s = envelope_check(&grid(c), 100, 3);
        pass &= s.peak_matches == s.draws && s.min_correlation > FIDELITY_CORR;
        parts.push(format!("C={c}: peaks {}/{} min corr {:.4}", s.peak_matches, s.draws, s.min_correlation));
    }
    let took = start.elapsed();
    pass &= took < FIDELITY_TIME;
    verdict(
        3,
        pass,
        format!("{} (need 100% and > {FIDELITY_CORR}), {took:.2?}", parts.join("; ")),
    );
}

#[test]
fn criterion_04_fir_vs_oracle() {
    let g = grid(8);
    let settings = [(4, 4), (8, 8), (16, 16)];
    let errs = channel_model_sweep(&g, &settings, 50, TapShape::Baseband, 4).unwrap();
    let wrap = channel_model_sweep(&g, &settings, 50, TapShape::WrapAware, 4).unwrap();
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let last = errs[2];
    verdict(
        4,
        last < ORACLE_RMS_TOL && decreasing,
        format!(
            "windowed-sinc FIR relative RMS (4,4) {:.3e}, (8,8) {:.3e}, (16,16) {:.3e} (need < {ORACLE_RMS_TOL:e}, decreasing); wrap-aware taps for reference: {:.3e}, {:.3e}, {:.3e}",
            errs[0], errs[1], errs[2], wrap[0], wrap[1], wrap[2]
        ),
    );
}

#[test]
fn criterion_05_noise_free_consistency() {
    let mut worst_k = 0.0f64;
    let mut worst_i = 0.0f64;
    for c in [8, 10, 18, 26] {
        let g = grid(c);
        let daft = Daft::new(&g);
        let table = elg_curve(&g);
        let x = build_pilot_frame(&g, &PilotLayout::new(&g, 0.0), DataFill::Zeros, 0).unwrap();
        let tx = append_cpp(&daft.modulate(&x).unwrap(), &g).unwrap();
        for i in 1..=9 {
            for j in 1..=9 {
                let (iota, kappa) = (i as f64 / 10.0, j as f64 / 10.0);
                let ch = LosChannel::ideal(1.0 + iota, 2.0 + kappa);
                let fir = FirDelayModel::new(iota, 16).unwrap();
                let r = strip_cpp(&propagate(&tx, &ch, &fir, &g).unwrap()).unwrap();
                let est = joint_estimate(&r, &daft, &SearchConfig::default(), &table).unwrap();
                worst_k = worst_k.max(circular_error(est.doppler() - ch.doppler).abs());
                worst_i = worst_i.max((est.delay() - ch.delay).abs());
            }
        }
    }
    verdict(
        5,
        worst_k < KAPPA_TOL && worst_i < IOTA_TOL,
        format!(
            "9x9 (iota, kappa) grid, l=1, k=2, C in {{8,10,18,26}}: max |kappa err| {worst_k:.2e} (< {KAPPA_TOL:e}), max |iota err| {worst_i:.2e} (< {IOTA_TOL:e})"
        ),
    );
}

/// `b` is no worse than `a` up to twice their combined standard error.
fn not_worse(a: f64, a_se: f64, b: f64, b_se: f64) -> bool {
    b <= a + 2.0 * (a_se * a_se + b_se * b_se).sqrt()
}

#[test]
fn criterion_06_error_floor_separation() {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        trials: 500,
        ep_ei_db: vec![10.0],
        estimators: vec![EstimatorKind::Proposed, EstimatorKind::IntegerOnly],
        ..Default::default()
    };
    let report = run_sweep(&cfg).unwrap();
    let took = start.elapsed();
    let prop = rows(&report, EstimatorKind::Proposed);
    let int = rows(&report, EstimatorKind::IntegerOnly);
    let monotone = prop.windows(2).all(|w| not_worse(w[0].delay_rmse, w[0].delay_rmse_se, w[1].delay_rmse, w[1].delay_rmse_se));
    let (p30, i30) = (prop.last().unwrap().delay_rmse, int.last().unwrap().delay_rmse);
    let curve: Vec<String> = prop.iter().map(|r| format!("{:.4}", r.delay_rmse)).collect();
    verdict(
        6,
        monotone && i30 >= FLOOR_RATIO * p30 && took < SWEEP_TIME,
        format!(
            "proposed delay RMSE over 0..30 dB [{}], monotone within 2 SE: {monotone}; at 30 dB integer-only {i30:.4} vs proposed {p30:.4} = {:.1}x (need >= {FLOOR_RATIO}x), {took:.1?}",
            curve.join(", "),
            i30 / p30
        ),
    );
}

/// Worst max/min RMSE ratio across `C` at each SNR, plus the delay RMSEs.
fn c_spread(cfg: &ExperimentConfig) -> (f64, Vec<String>) {
    let report = run_sweep(cfg).unwrap();
    let mut worst: f64 = 1.0;
    let mut parts = Vec::new();
    for &snr in &cfg.snr_db {
        let at: Vec<_> = report.rows.iter().filter(|r| r.snr_db == snr).collect();
        for metric in [|r: &afdm::harness::RmseRow| r.delay_rmse, |r: &afdm::harness::RmseRow| r.doppler_rmse] {
            let v: Vec<f64> = at.iter().map(|r| metric(r)).collect();
            let hi = v.iter().cloned().fold(f64::MIN, f64::max);
            let lo = v.iter().cloned().fold(f64::MAX, f64::min);
            worst = worst.max(hi / lo);
        }
        parts.push(format!(
            "{snr} dB delay [{}]",
            at.iter().map(|r| format!("{:.4}", r.delay_rmse)).collect::<Vec<_>>().join(", ")
        ));
    }
    (worst, parts)
}

#[test]
fn criterion_07_c_insensitivity() {
    let cfg = ExperimentConfig {
        trials: 300,
        segments: vec![10, 18, 26],
        snr_db: vec![10.0, 15.0, 20.0, 25.0, 30.0],
        estimators: vec![EstimatorKind::Proposed],
        ..Default::default()
    };
    let (worst, parts) = c_spread(&cfg);
    // diagnostic only: a guard covering C * l_max + 2 k_max for the largest C
    let (wide, wide_parts) = c_spread(&ExperimentConfig { guard_width: Some(26 * 3 + 2 * 3), ..cfg.clone() });
    verdict(
        7,
        worst <= C_SPREAD,
        format!(
            "C = 10, 18, 26: {}; worst max/min ratio {worst:.2} (need <= {C_SPREAD}); with an 84-chirp guard {wide:.2} ({})",
            parts.join("; "),
            wide_parts.join("; ")
        ),
    );
}

#[test]
fn criterion_08_pilot_energy_trend() {
    let cfg = ExperimentConfig {
        trials: 300,
        snr_db: vec![20.0],
        ep_ei_db: vec![0.0, 10.0, 20.0, 30.0, 40.0],
        estimators: vec![EstimatorKind::Proposed],
        ..Default::default()
    };
    let report = run_sweep(&cfg).unwrap();
    let r = &report.rows;
    let improves = (0..2).all(|i| r[i + 1].delay_rmse < r[i].delay_rmse && r[i + 1].doppler_rmse < r[i].doppler_rmse);
    let ratio = |a: f64, b: f64| a.max(b) / a.min(b);
    let plateau = ratio(r[3].delay_rmse, r[4].delay_rmse) < PLATEAU_RATIO
        && ratio(r[3].doppler_rmse, r[4].doppler_rmse) < PLATEAU_RATIO;
    let doppler_better = r.iter().all(|x| x.doppler_rmse < x.delay_rmse);
    let listing: Vec<String> = r
        .iter()
        .map(|x| format!("{} dB: delay {:.4} doppler {:.4}", x.ep_ei_db, x.delay_rmse, x.doppler_rmse))
        .collect();
    verdict(
        8,
        improves && plateau && doppler_better,
        format!(
            "SNR 20 dB, {}; improves 0->10->20: {improves}, 30 vs 40 within {PLATEAU_RATIO}x: {plateau}, Doppler < delay everywhere: {doppler_better}",
            listing.join("; ")
        ),
    );
}

#[test]
fn criterion_09_elg_curve() {
    let mut worst_mid = 0.0f64;
    let mut monotone = true;
    let mut worst_trip = 0.0f64;
    for c in [8, 10, 18, 26] {
        let table = elg_curve(&grid(c));
        let mid = table.iotas().iter().position(|&i| (i - 0.5).abs() < 1e-12).unwrap();
        worst_mid = worst_mid.max(table.values()[mid].abs());
        monotone &= table.is_strictly_monotone();
        for (&i, &v) in table.iotas().iter().zip(table.values()) {
            worst_trip = worst_trip.max((table.invert(v) - i).abs());
        }
    }
    verdict(
        9,
        worst_mid < ELG_MID_TOL && monotone && worst_trip < ELG_ROUND_TRIP_TOL,
        format!(
            "|A(0.5)| = {worst_mid:.1e} (< {ELG_MID_TOL:e}), strictly monotone: {monotone}, round-trip error {worst_trip:.1e} (< {ELG_ROUND_TRIP_TOL:e})"
        ),
    );
}

#[test]
fn criterion_10_determinism() {
    let cfg = ExperimentConfig {
        trials: 12,
        estimates_per_trial: 3,
        snr_db: vec![5.0, 25.0],
        ep_ei_db: vec![0.0, 20.0],
        segments: vec![10, 18],
        ..Default::default()
    };
    let a = run_sweep(&cfg).unwrap().to_csv_string().unwrap();
    let b = run_sweep(&cfg).unwrap().to_csv_string().unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| run_sweep(&cfg).unwrap().to_csv_string().unwrap());
    let (a, b, c) = (csv_without_wall_time(&a), csv_without_wall_time(&b), csv_without_wall_time(&c));
    let other_seed = csv_without_wall_time(
        &run_sweep(&ExperimentConfig { master_seed: 2, ..cfg.clone() }).unwrap().to_csv_string().unwrap(),
    );
    verdict(
        10,
        a == b && a == c && a != other_seed,
        format!(
            "{} rows; identical across two runs: {}, identical on one thread: {}, differs for another seed: {}",
            a.lines().count() - 1,
            a == b,
            a == c,
            a != other_seed
        ),
    );
}
