//! Early-late gate factor against fractional delay, and its inversion.

use afdm::effective::elg_curve;
use afdm::AfdmGrid;

fn main() -> afdm::Result<()> {
    for c in [8, 10, 18, 26] {
        let grid = AfdmGrid::with_segments(256, 3, c, std::f64::consts::SQRT_2, 3, 32)?;
        let table = elg_curve(&grid);
        let (lo, hi) = table.range();
        println!("C = {c}: A in [{lo:.2}, {hi:.2}] dB, strictly monotone: {}", table.is_strictly_monotone());
    }
    let grid = AfdmGrid::with_segments(256, 3, 8, std::f64::consts::SQRT_2, 3, 32)?;
    let table = elg_curve(&grid);
    println!("{:>6} {:>9} {:>9}", "iota", "A (dB)", "inverse");
    for (i, v) in table.iotas().iter().zip(table.values()).step_by(70) {
        println!("{i:>6.3} {v:>9.4} {:>9.4}", table.invert(*v));
    }
    Ok(())
}
