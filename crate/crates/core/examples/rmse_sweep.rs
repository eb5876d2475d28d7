//! Small RMSE-versus-SNR sweep; prints the CSV report. Pass a trial count
//! as the first argument to change the default of 50.

use afdm::harness::{run_sweep, EstimatorKind, ExperimentConfig};

fn main() -> afdm::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(50);
    let cfg = ExperimentConfig {
        trials,
        snr_db: vec![0.0, 10.0, 20.0, 30.0],
        estimators: vec![EstimatorKind::Proposed, EstimatorKind::IntegerOnly],
        ..Default::default()
    };
    let report = run_sweep(&cfg)?;
    report.write_csv(std::io::stdout().lock())?;
    Ok(())
}
