use std::f64::consts::PI;

use num_complex::Complex64;

/// Normalised sinc, `sin(pi x) / (pi x)`.
pub(crate) fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    // exact zeros at non-zero integers
    if x.fract() == 0.0 {
        return 0.0;
    }
    let px = PI * x;
    px.sin() / px
}

/// `exp(i 2 pi cycles)` with the argument reduced to one turn first.
#[inline]
pub(crate) fn cis(cycles: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * (cycles - cycles.floor())).sin_cos();
    Complex64::new(c, s)
}

/// Reduce a real `x` modulo `n` into `[-n/2, n/2)`.
#[inline]
pub(crate) fn wrap_centered(x: f64, n: usize) -> f64 {
    let n = n as f64;
    (x + 0.5 * n).rem_euclid(n) - 0.5 * n
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub(crate) fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    sab / (saa * sbb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_zeros_and_peak() {
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sinc(3.0), 0.0);
        assert!((sinc(0.5) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn centered_wrap() {
        assert_eq!(wrap_centered(255.0, 256), -1.0);
        assert_eq!(wrap_centered(-128.0, 256), -128.0);
        assert_eq!(wrap_centered(3.5, 256), 3.5);
    }
}
