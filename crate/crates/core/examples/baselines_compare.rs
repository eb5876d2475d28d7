//! The proposed estimator against the integer-only and 2-D simplex
//! baselines on a handful of channels at 25 dB SNR.

use afdm::harness::{run_trial, ExperimentConfig, Point, Scenario};

fn main() -> afdm::Result<()> {
    let cfg = ExperimentConfig { estimates_per_trial: 1, ..Default::default() };
    let scenario = Scenario::new(&cfg, cfg.grids()?.remove(0))?;
    let point = Point { snr_db: 25.0, ep_ei_db: 10.0 };
    for trial in 0..6 {
        let out = run_trial(&scenario, &point, trial)?;
        println!("trial {trial}: L = {:.3}, K = {:.3}", out.truth.delay, out.truth.doppler);
        for (kind, est) in &out.estimates {
            let e = &est[0];
            println!("  {:<13} L^ = {:.3}  K^ = {:.3}", kind.name(), e.delay(), e.doppler());
        }
    }
    Ok(())
}
