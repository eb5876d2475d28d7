//! Compare the fractional-delay FIR channel with the oversampled
//! continuous-time reference, for both tap shapes.

use afdm::channel::{LosChannel, TapShape};
use afdm::harness::{channel_model_error, channel_model_sweep};
use afdm::estimator::{build_pilot_frame, DataFill, PilotLayout};
use afdm::AfdmGrid;

fn main() -> afdm::Result<()> {
    let grid = AfdmGrid::new(256, 3, 2, std::f64::consts::SQRT_2, 3, 32)?;
    let x = build_pilot_frame(&grid, &PilotLayout::new(&grid, 10.0), DataFill::Qpsk, 1)?;

    let ch = LosChannel::ideal(1.5, 0.7);
    for shape in [TapShape::Baseband, TapShape::WrapAware] {
        let e = channel_model_error(&grid, &x, &ch, 16, 16, shape)?;
        println!("{shape:?}: L = 1.5, K = 0.7, W = 16, O = 16 -> relative RMS {e:.4}");
    }

    let settings = [(4, 4), (8, 8), (16, 16), (32, 32)];
    let grid = AfdmGrid::new(256, 3, 2, std::f64::consts::SQRT_2, 3, 40)?;
    for shape in [TapShape::Baseband, TapShape::WrapAware] {
        let errs = channel_model_sweep(&grid, &settings, 10, shape, 3)?;
        let line: Vec<String> = settings.iter().zip(&errs).map(|((w, o), e)| format!("({w},{o}) {e:.4}")).collect();
        println!("{shape:?} mean over 10 channels: {}", line.join("  "));
    }
    Ok(())
}
