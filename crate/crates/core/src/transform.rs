//! Discrete affine Fourier transform and the chirp-periodic prefix.
//!
//! The subcarrier basis is
//! `phi_n(m) = exp(i 2 pi (c1 n^2 + c2 m^2 + n m / N)) / sqrt(N)`.
//! [`daft_modulate`] and [`daft_demodulate`] evaluate the O(N^2) sums
//! directly; [`Daft`] factors the transform into chirp, FFT, chirp and is
//! what the estimator uses in its inner loops.

use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{AfdmError, Result};
use crate::frame::{DaftFrame, TimeFrame};
use crate::grid::AfdmGrid;
use crate::math::cis;
use crate::Complex64;

/// `s[n] = sum_m x[m] phi_n(m)`, returned without a prefix.
pub fn daft_modulate(x: &DaftFrame, grid: &AfdmGrid) -> Result<TimeFrame> {
    let n = grid.n();
    x.expect_len(n)?;
    let scale = 1.0 / (n as f64).sqrt();
    let pre: Vec<Complex64> = x
        .symbols()
        .iter()
        .enumerate()
        .map(|(m, &v)| v * grid.c2_chirp(m as i64))
        .collect();
    let samples = (0..n)
        .map(|t| {
            let acc: Complex64 = pre
                .iter()
                .enumerate()
                .map(|(m, &v)| v * cis(((t * m) % n) as f64 / n as f64))
                .sum();
            acc * grid.c1_chirp(t as i64) * scale
        })
        .collect();
    Ok(TimeFrame::body(samples))
}

/// `y[m] = sum_n r[n] conj(phi_n(m))`; `r` must not carry a prefix.
pub fn daft_demodulate(r: &TimeFrame, grid: &AfdmGrid) -> Result<DaftFrame> {
    let n = grid.n();
    r.expect_body(n)?;
    let scale = 1.0 / (n as f64).sqrt();
    let pre: Vec<Complex64> = r
        .samples()
        .iter()
        .enumerate()
        .map(|(t, &v)| v * grid.c1_chirp(t as i64).conj())
        .collect();
    let symbols = (0..n)
        .map(|m| {
            let acc: Complex64 = pre
                .iter()
                .enumerate()
                .map(|(t, &v)| v * cis(-(((t * m) % n) as f64) / n as f64))
                .sum();
            acc * grid.c2_chirp(m as i64).conj() * scale
        })
        .collect();
    Ok(DaftFrame::new(symbols))
}

/// Phase that maps sample `n` of the frame body onto its chirp-periodic
/// image at `n - N`: `exp(-i 2 pi c1 (N^2 + 2 N n))` for `n < 0`.
fn prefix_phase(grid: &AfdmGrid, n: i64) -> Complex64 {
    let big_n = grid.n() as i64;
    // c1 (N^2 + 2 N n) = C (N + 2 n) / 2
    let two_n = 2 * big_n as i128;
    let num = (grid.segments() as i128 * (big_n as i128 * big_n as i128 + 2 * big_n as i128 * n as i128))
        .rem_euclid(two_n);
    cis(-(num as f64) / two_n as f64)
}

/// Prepends `n_cp` samples `s[n] = s[N + n] exp(-i 2 pi c1 (N^2 + 2 N n))`.
pub fn append_cpp(s: &TimeFrame, grid: &AfdmGrid) -> Result<TimeFrame> {
    let n = grid.n();
    s.expect_body(n)?;
    let n_cp = grid.n_cp();
    if n_cp > n {
        return Err(AfdmError::InvalidParameter(format!(
            "prefix length {n_cp} exceeds frame length {n}"
        )));
    }
    let body = s.samples();
    let mut out = Vec::with_capacity(n + n_cp);
    for k in -(n_cp as i64)..0 {
        out.push(body[(n as i64 + k) as usize] * prefix_phase(grid, k));
    }
    out.extend_from_slice(body);
    TimeFrame::new(out, n_cp)
}

/// Drops the prefix samples.
pub fn strip_cpp(s: &TimeFrame) -> Result<TimeFrame> {
    if s.cpp_len() == 0 {
        return Err(AfdmError::PrefixMissing);
    }
    Ok(TimeFrame::body(s.body_samples().to_vec()))
}

/// Value of the chirp-periodic continuation of a frame body at any integer
/// index: `s[n] = s[(n)_N] exp(i 2 pi c1 (n^2 - (n)_N^2))`.
pub fn chirp_periodic_sample(body: &[Complex64], grid: &AfdmGrid, n: i64) -> Complex64 {
    let big_n = body.len() as i64;
    let r = n.rem_euclid(big_n);
    let two_n = 2 * grid.n() as i128;
    let num = (grid.segments() as i128 * ((n as i128).pow(2) - (r as i128).pow(2))).rem_euclid(two_n);
    body[r as usize] * cis(num as f64 / two_n as f64)
}

/// Chirp-FFT-chirp factorisation of the DAFT for one grid.
#[derive(Clone)]
pub struct Daft {
    grid: AfdmGrid,
    c1: Vec<Complex64>,
    c2: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Daft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Daft").field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl Daft {
    pub fn new(grid: &AfdmGrid) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        Self {
            grid: grid.clone(),
            c1: (0..n as i64).map(|t| grid.c1_chirp(t)).collect(),
            c2: (0..n as i64).map(|m| grid.c2_chirp(m)).collect(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn grid(&self) -> &AfdmGrid {
        &self.grid
    }

    pub fn modulate(&self, x: &DaftFrame) -> Result<TimeFrame> {
        x.expect_len(self.grid.n())?;
        let scale = 1.0 / (self.grid.n() as f64).sqrt();
        let mut buf: Vec<Complex64> =
            x.symbols().iter().zip(&self.c2).map(|(v, c)| v * c).collect();
        self.inverse.process(&mut buf);
        for (v, c) in buf.iter_mut().zip(&self.c1) {
            *v *= c * scale;
        }
        Ok(TimeFrame::body(buf))
    }

    pub fn demodulate(&self, r: &TimeFrame) -> Result<DaftFrame> {
        r.expect_body(self.grid.n())?;
        Ok(DaftFrame::new(self.demodulate_samples(r.samples())))
    }

    /// Demodulates a raw post-prefix slice of length `N`.
    pub fn demodulate_samples(&self, r: &[Complex64]) -> Vec<Complex64> {
        let scale = 1.0 / (self.grid.n() as f64).sqrt();
        let mut buf: Vec<Complex64> = r.iter().zip(&self.c1).map(|(v, c)| v * c.conj()).collect();
        self.forward.process(&mut buf);
        for (v, c) in buf.iter_mut().zip(&self.c2) {
            *v *= c.conj() * scale;
        }
        buf
    }
}
