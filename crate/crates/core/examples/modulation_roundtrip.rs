//! Modulate a random QPSK frame, add the chirp-periodic prefix, strip it and
//! demodulate again. Also checks the FFT path against the direct sums.

use afdm::transform::{append_cpp, daft_demodulate, daft_modulate, strip_cpp, Daft};
use afdm::{AfdmGrid, Complex64, DaftFrame};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> afdm::Result<()> {
    let grid = AfdmGrid::new(256, 3, 2, std::f64::consts::SQRT_2, 3, 32)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = DaftFrame::new(
        (0..grid.n())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    );

    let daft = Daft::new(&grid);
    let s = daft.modulate(&x)?;
    let tx = append_cpp(&s, &grid)?;
    let back = daft.demodulate(&strip_cpp(&tx)?)?;
    let err = back.symbols().iter().zip(x.symbols()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

    let direct = daft_demodulate(&daft_modulate(&x, &grid)?, &grid)?;
    let fast_vs_direct = direct.symbols().iter().zip(back.symbols()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

    println!("N = {}, C = {}, c1 = {:.6}, prefix = {}", grid.n(), grid.segments(), grid.c1(), grid.n_cp());
    println!("energy in {:.6}, energy out {:.6}", x.energy(), s.body_samples().iter().map(|v| v.norm_sqr()).sum::<f64>());
    println!("max |demod(mod(x)) - x| = {err:.3e}");
    println!("max |fast - direct|     = {fast_vs_direct:.3e}");
    Ok(())
}
