//! Exact effective-channel magnitude of the pilot column against the
//! closed-form sinc envelope, around the pilot response.

use afdm::effective::{envelope_fidelity, magnitude_profile, EffectiveChannel, EnvelopeParams};
use afdm::AfdmGrid;

fn main() -> afdm::Result<()> {
    let grid = AfdmGrid::with_segments(256, 3, 8, std::f64::consts::SQRT_2, 3, 32)?;
    let eff = EffectiveChannel::new(&grid);
    let p = EnvelopeParams::new(1, 0.3, 2, 0.4);

    println!("l = {}, iota = {}, k = {}, kappa = {}, C = {}", p.l, p.iota, p.k, p.kappa, grid.segments());
    println!("{:>4} {:>10} {:>10} {:>8} {:>10}", "m", "|F|", "upsilon", "theta", "envelope");
    let rows = magnitude_profile(&eff, &p, 0);
    for r in rows.iter().filter(|r| r.m >= 220 && r.m < 256) {
        println!("{:>4} {:>10.3} {:>10.3} {:>8.4} {:>10.3}", r.m, r.exact, r.upsilon, r.theta, r.envelope);
    }
    let f = envelope_fidelity(&eff, &p, 0);
    println!("peak (exact) {}  peak (envelope) {}  correlation {:.4}", f.exact_peak, f.envelope_peak, f.correlation);
    Ok(())
}
