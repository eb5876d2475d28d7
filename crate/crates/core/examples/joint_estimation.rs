//! One pilot frame through a fractional delay/Doppler channel, estimated
//! with the PSPR Doppler search and the early-late gate.

use afdm::channel::{apply_los_channel, FirDelayModel, LosChannel, TapShape};
use afdm::effective::elg_curve;
use afdm::estimator::{build_pilot_frame, joint_estimate, DataFill, PilotLayout, SearchConfig};
use afdm::transform::{append_cpp, strip_cpp, Daft};
use afdm::{AfdmGrid, Complex64};

fn main() -> afdm::Result<()> {
    let grid = AfdmGrid::with_segments(256, 3, 10, std::f64::consts::SQRT_2, 3, 32)?;
    let daft = Daft::new(&grid);
    let table = elg_curve(&grid);
    let layout = PilotLayout::new(&grid, 20.0);
    let x = build_pilot_frame(&grid, &layout, DataFill::Qpsk, 42)?;
    let tx = append_cpp(&daft.modulate(&x)?, &grid)?;

    for (delay, doppler, noise_var) in [(1.3, 2.4, 0.0), (0.62, -1.85, 0.0), (2.27, 0.33, 0.05)] {
        let ch = LosChannel::new(Complex64::from_polar(1.0, 0.8), delay, doppler, noise_var)?;
        let fir = FirDelayModel::with_shape(ch.frac_delay(), 16, TapShape::Baseband, &grid)?;
        let r = strip_cpp(&apply_los_channel(&tx, &ch, &fir, &grid, 9)?)?;
        let est = joint_estimate(&r, &daft, &SearchConfig::default(), &table)?;
        println!(
            "L = {delay:>5.2}, K = {doppler:>5.2}, sigma^2 = {noise_var:<4} -> L^ = {:.3} (l {} + {:.3}), K^ = {:.3} (k {} + {:.3}), PSPR {:.1}",
            est.delay(),
            est.l_hat,
            est.iota_hat,
            est.doppler(),
            est.k_hat,
            est.kappa_hat,
            est.pspr
        );
    }
    Ok(())
}
