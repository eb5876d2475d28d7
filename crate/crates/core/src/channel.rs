//! Single-path (line-of-sight) channel with fractional delay and Doppler.
//!
//! Two routes produce the delayed, Doppler-shifted received frame:
//!
//! * [`apply_los_channel`] runs the transmitted samples (with their prefix)
//!   through a windowed-sinc fractional-delay FIR and multiplies by the
//!   Doppler phasor. This is the model used by the Monte Carlo harness.
//! * [`oversampled_oracle`] synthesises the continuous-time waveform, whose
//!   chirp carriers wrap their instantaneous frequency back into one
//!   sampling bandwidth at every segment boundary, delays it on a grid
//!   `O` times finer than a sample and samples it again.
//!
//! The Doppler phasor is `exp(-i 2 pi K n / N)`, with `n` counted from the
//! first post-prefix sample. With this sign a pilot at chirp index 0 lands
//! at index `-(K + C L) mod N` of the demodulated frame.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{AfdmError, Result};
use crate::frame::{DaftFrame, TimeFrame};
use crate::grid::AfdmGrid;
use crate::math::{cis, sinc};
use crate::transform::chirp_periodic_sample;
use crate::Complex64;

/// Gain, delay `L = l + iota` (samples), Doppler `K = k + kappa`
/// (subcarrier spacings) and per-sample noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LosChannel {
    pub gain: Complex64,
    pub delay: f64,
    pub doppler: f64,
    pub noise_var: f64,
}

impl LosChannel {
    pub fn new(gain: Complex64, delay: f64, doppler: f64, noise_var: f64) -> Result<Self> {
        if !(delay >= 0.0) || !delay.is_finite() {
            return Err(AfdmError::InvalidParameter(format!("delay {delay} must be >= 0")));
        }
        if !doppler.is_finite() {
            return Err(AfdmError::InvalidParameter(format!("Doppler {doppler} is not finite")));
        }
        if !(noise_var >= 0.0) {
            return Err(AfdmError::NegativeNoise(noise_var));
        }
        Ok(Self { gain, delay, doppler, noise_var })
    }

    /// Unit gain, no noise.
    pub fn ideal(delay: f64, doppler: f64) -> Self {
        Self { gain: Complex64::new(1.0, 0.0), delay, doppler, noise_var: 0.0 }
    }

    /// Integer delay `l = floor(L)`.
    pub fn int_delay(&self) -> i64 {
        self.delay.floor() as i64
    }

    /// Fractional delay `iota = L - l`, in `[0, 1)`.
    pub fn frac_delay(&self) -> f64 {
        self.delay - self.delay.floor()
    }

    /// Signed integer Doppler `k = floor(K)`.
    pub fn int_doppler(&self) -> i64 {
        self.doppler.floor() as i64
    }

    /// Fractional Doppler `kappa = K - floor(K)`, in `[0, 1)`.
    pub fn frac_doppler(&self) -> f64 {
        self.doppler - self.doppler.floor()
    }
}

/// Coefficient shape of the fractional-delay filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TapShape {
    /// Real lowpass taps `sinc(j - iota)`: the usual baseband equivalent,
    /// which assumes the signal occupies `[-1/2, 1/2)` cycles per sample.
    #[default]
    Baseband,
    /// Complex taps `sinc(j - iota) exp(i pi (j - iota)) exp(-i 2 pi c1 (j - iota)^2)`.
    /// This is the discrete equivalent of delaying the wrapped
    /// continuous-time chirp waveform, whose band is `[0, 1)`.
    WrapAware,
}

/// Windowed-sinc fractional-delay FIR on `j = -W ..= W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirDelayModel {
    half_width: usize,
    frac: f64,
    shape: TapShape,
    taps: Vec<Complex64>,
}

impl FirDelayModel {
    /// Real raised-cosine-windowed sinc taps for fractional delay `frac`.
    pub fn new(frac: f64, half_width: usize) -> Result<Self> {
        Self::build(frac, half_width, TapShape::Baseband, 0.0)
    }

    /// Taps of the given shape; `WrapAware` needs the grid's chirp rate.
    pub fn with_shape(frac: f64, half_width: usize, shape: TapShape, grid: &AfdmGrid) -> Result<Self> {
        Self::build(frac, half_width, shape, grid.c1())
    }

    fn build(frac: f64, half_width: usize, shape: TapShape, c1: f64) -> Result<Self> {
        if half_width < 4 {
            return Err(AfdmError::InvalidParameter(format!(
                "FIR half width {half_width} must be at least 4"
            )));
        }
        if !(0.0..1.0).contains(&frac) {
            return Err(AfdmError::InvalidParameter(format!("fractional delay {frac} outside [0, 1)")));
        }
        let w = half_width as i64;
        let span = (half_width + 1) as f64;
        let mut taps: Vec<Complex64> = (-w..=w)
            .map(|j| {
                let u = j as f64 - frac;
                let window = 0.5 * (1.0 + (std::f64::consts::PI * u / span).cos());
                let amp = sinc(u) * window;
                match shape {
                    TapShape::Baseband => Complex64::new(amp, 0.0),
                    TapShape::WrapAware => amp * cis(0.5 * u - c1 * u * u),
                }
            })
            .collect();
        let energy: f64 = taps.iter().map(|t| t.norm_sqr()).sum();
        let scale = 1.0 / energy.sqrt();
        taps.iter_mut().for_each(|t| *t *= scale);
        Ok(Self { half_width, frac, shape, taps })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn frac(&self) -> f64 {
        self.frac
    }

    pub fn shape(&self) -> TapShape {
        self.shape
    }

    /// Tap at offset `j` in `-W ..= W`.
    pub fn tap(&self, j: i64) -> Complex64 {
        self.taps[(j + self.half_width as i64) as usize]
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }
}

/// Noise-free propagation: delay through the FIR, then the Doppler phasor.
///
/// The input must carry its prefix; the output keeps the same layout. Taps
/// that reach past the end of the frame read its chirp-periodic
/// continuation. Post-prefix outputs may not need samples older than the
/// prefix.
pub fn propagate(s: &TimeFrame, ch: &LosChannel, fir: &FirDelayModel, grid: &AfdmGrid) -> Result<TimeFrame> {
    let n = grid.n();
    if s.body_len() != n {
        return Err(AfdmError::LengthMismatch { expected: n, actual: s.body_len() });
    }
    if (fir.frac() - ch.frac_delay()).abs() > 1e-12 {
        return Err(AfdmError::InvalidParameter(format!(
            "FIR built for fractional delay {} but channel has {}",
            fir.frac(),
            ch.frac_delay()
        )));
    }
    let cpp = s.cpp_len() as i64;
    let l = ch.int_delay();
    let w = fir.half_width() as i64;
    let needed = (l + w) as usize;
    if l + w > cpp {
        return Err(AfdmError::DelayExceedsPrefix { needed, available: s.cpp_len() });
    }
    let body = s.body_samples();
    let source = |p: i64| -> Complex64 {
        if p >= n as i64 {
            chirp_periodic_sample(body, grid, p)
        } else {
            s.at(p).unwrap_or_default()
        }
    };
    let out = (-cpp..n as i64)
        .map(|t| {
            let acc: Complex64 = (-w..=w).map(|j| fir.tap(j) * source(t - l - j)).sum();
            ch.gain * acc * cis(-ch.doppler * t as f64 / n as f64)
        })
        .collect();
    TimeFrame::new(out, s.cpp_len())
}

/// Adds i.i.d. `CN(0, noise_var)` samples drawn from `rng`.
pub fn add_awgn<R: Rng + ?Sized>(s: &TimeFrame, noise_var: f64, rng: &mut R) -> Result<TimeFrame> {
    if !(noise_var >= 0.0) {
        return Err(AfdmError::NegativeNoise(noise_var));
    }
    let mut out = s.clone();
    if noise_var == 0.0 {
        return Ok(out);
    }
    let sd = (0.5 * noise_var).sqrt();
    for v in out.samples_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v += Complex64::new(re, im) * sd;
    }
    Ok(out)
}

/// Adds `CN(0, noise_var)` noise from a generator seeded with `seed`.
pub fn awgn(s: &TimeFrame, noise_var: f64, seed: u64) -> Result<TimeFrame> {
    add_awgn(s, noise_var, &mut ChaCha12Rng::seed_from_u64(seed))
}

/// [`propagate`] followed by [`awgn`] with the channel's noise variance.
pub fn apply_los_channel(
    s: &TimeFrame,
    ch: &LosChannel,
    fir: &FirDelayModel,
    grid: &AfdmGrid,
    seed: u64,
) -> Result<TimeFrame> {
    awgn(&propagate(s, ch, fir, grid)?, ch.noise_var, seed)
}

/// Continuous-time AFDM waveform at time `t` (in samples).
///
/// Carrier `m` in segment `q` has phase
/// `c2 m^2 + c1 t^2 + m t / N + (q / 2c1)(q - m/N) - q t + phi_{m,q}`,
/// where `phi_{m,q}` rounds the constant term down to an integer and the
/// segment index `q = floor((C t + m) / N)` advances whenever the
/// instantaneous frequency `C t / N + m / N - q` reaches one cycle per
/// sample. The same rule continues the waveform before `t = 0` (the prefix).
pub fn continuous_waveform(x: &DaftFrame, grid: &AfdmGrid, t: f64) -> Complex64 {
    let n = grid.n();
    let nf = n as f64;
    let c = grid.segments() as f64;
    let c1 = grid.c1();
    let quad = (c1 * t * t).rem_euclid(1.0);
    let acc: Complex64 = x
        .symbols()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm_sqr() > 0.0)
        .map(|(m, &v)| {
            let mf = m as f64;
            let q = ((c * t + mf) / nf).floor();
            let constant = q / (2.0 * c1) * (q - mf / nf);
            let phi = constant.floor() - constant;
            let cycles = grid.c2_cycles(m as i64)
                + quad
                + (mf * t / nf).rem_euclid(1.0)
                - (q * t).rem_euclid(1.0)
                + (constant + phi).rem_euclid(1.0);
            v * cis(cycles)
        })
        .sum();
    acc / nf.sqrt()
}

/// Noise-free received frame (with prefix) from the continuous-time
/// waveform, delayed by `round(O L)` ticks of `1/O` sample and shifted by
/// `exp(-i 2 pi K t / N)`, then decimated by `O`.
///
/// Only the ticks that survive decimation are synthesised.
pub fn oversampled_oracle(x: &DaftFrame, grid: &AfdmGrid, ch: &LosChannel, oversampling: usize) -> Result<TimeFrame> {
    x.expect_len(grid.n())?;
    if oversampling == 0 {
        return Err(AfdmError::InvalidParameter("oversampling factor must be positive".into()));
    }
    let o = oversampling as i64;
    let shift = (ch.delay * oversampling as f64).round() as i64;
    let n = grid.n() as i64;
    let cpp = grid.n_cp() as i64;
    let out = (-cpp..n)
        .map(|t| {
            let tick = t * o - shift;
            let tau = tick as f64 / o as f64;
            ch.gain * continuous_waveform(x, grid, tau) * cis(-ch.doppler * t as f64 / n as f64)
        })
        .collect();
    TimeFrame::new(out, grid.n_cp())
}

/// Relative RMS difference of the post-prefix parts of two frames.
pub fn relative_rms(reference: &TimeFrame, other: &TimeFrame) -> f64 {
    let a = reference.body_samples();
    let b = other.body_samples();
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    (num / den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{append_cpp, daft_modulate, strip_cpp};

    fn grid() -> AfdmGrid {
        AfdmGrid::new(256, 3, 2, 2f64.sqrt(), 3, 24).unwrap()
    }

    fn random_frame(seed: u64) -> DaftFrame {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        DaftFrame::new((0..256).map(|_| cis(rng.gen_range(0..4) as f64 / 4.0 + 0.125)).collect())
    }

    fn tx(x: &DaftFrame, g: &AfdmGrid) -> TimeFrame {
        append_cpp(&daft_modulate(x, g).unwrap(), g).unwrap()
    }

    #[test]
    fn channel_parts() {
        let ch = LosChannel::new(Complex64::new(1.0, 0.0), 2.37, -1.25, 0.1).unwrap();
        assert_eq!(ch.int_delay(), 2);
        assert!((ch.frac_delay() - 0.37).abs() < 1e-12);
        assert_eq!(ch.int_doppler(), -2);
        assert!((ch.frac_doppler() - 0.75).abs() < 1e-12);
        assert!(LosChannel::new(Complex64::new(1.0, 0.0), 1.0, 0.0, -1.0).is_err());
        assert!(LosChannel::new(Complex64::new(1.0, 0.0), -0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn fir_energy_and_width() {
        for frac in [0.0, 0.3, 0.5, 0.9] {
            for w in [4, 8, 16] {
                let f = FirDelayModel::new(frac, w).unwrap();
                let e: f64 = f.taps().iter().map(|t| t.norm_sqr()).sum();
                assert!((0.99..=1.01).contains(&e));
                assert_eq!(f.taps().len(), 2 * w + 1);
            }
        }
        assert!(FirDelayModel::new(0.2, 3).is_err());
        let unit = FirDelayModel::new(0.0, 8).unwrap();
        assert_eq!(unit.tap(0), Complex64::new(1.0, 0.0));
        assert_eq!(unit.tap(3), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn integer_channel_is_shift_and_phasor() {
        let g = grid();
        let x = random_frame(1);
        let s = tx(&x, &g);
        let ch = LosChannel::ideal(2.0, 1.0);
        let fir = FirDelayModel::new(0.0, 16).unwrap();
        let r = apply_los_channel(&s, &ch, &fir, &g, 5).unwrap();
        for t in 0..256i64 {
            let expect = s.at(t - 2).unwrap() * cis(-(t as f64) / 256.0);
            assert!((r.at(t).unwrap() - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn doppler_phasor_slope() {
        let g = grid();
        let s = tx(&random_frame(2), &g);
        let ch = LosChannel::ideal(0.0, 2.6);
        let fir = FirDelayModel::new(0.0, 16).unwrap();
        let r = propagate(&s, &ch, &fir, &g).unwrap();
        for t in 0..256i64 {
            let ratio = r.at(t).unwrap() / s.at(t).unwrap();
            assert!((ratio.norm() - 1.0).abs() < 1e-9);
            let expect = cis(-2.6 * t as f64 / 256.0);
            assert!((ratio - expect).norm() < 1e-9);
        }
    }

    #[test]
    fn zero_gain_leaves_noise_only() {
        let g = grid();
        let s = tx(&random_frame(3), &g);
        let ch = LosChannel::new(Complex64::new(0.0, 0.0), 1.5, 0.4, 0.5).unwrap();
        let fir = FirDelayModel::new(0.5, 16).unwrap();
        let r = apply_los_channel(&s, &ch, &fir, &g, 9).unwrap();
        let noise = awgn(&TimeFrame::new(vec![Complex64::default(); 280], 24).unwrap(), 0.5, 9).unwrap();
        assert_eq!(r, noise);
    }

    #[test]
    fn delay_beyond_prefix_is_rejected() {
        let g = AfdmGrid::new(256, 3, 2, 2f64.sqrt(), 3, 8).unwrap();
        let s = tx(&random_frame(4), &g);
        let fir = FirDelayModel::new(0.5, 16).unwrap();
        let err = propagate(&s, &LosChannel::ideal(1.5, 0.0), &fir, &g).unwrap_err();
        assert!(matches!(err, AfdmError::DelayExceedsPrefix { needed: 17, available: 8 }));
    }

    #[test]
    fn awgn_contract() {
        let s = TimeFrame::body(vec![Complex64::new(1.0, -1.0); 64]);
        assert_eq!(awgn(&s, 0.0, 1).unwrap(), s);
        assert_eq!(awgn(&s, 0.3, 42).unwrap(), awgn(&s, 0.3, 42).unwrap());
        assert_ne!(awgn(&s, 0.3, 42).unwrap(), awgn(&s, 0.3, 43).unwrap());
        assert!(matches!(awgn(&s, -0.1, 1), Err(AfdmError::NegativeNoise(_))));
    }

    #[test]
    fn awgn_variance() {
        let zeros = TimeFrame::body(vec![Complex64::default(); 1_000_000]);
        let sigma2 = 0.37;
        let noisy = awgn(&zeros, sigma2, 2024).unwrap();
        let p = noisy.samples().iter().map(|v| v.norm_sqr()).sum::<f64>() / 1e6;
        assert!((p / sigma2 - 1.0).abs() < 0.01, "{p}");
    }

    #[test]
    fn oracle_identity_matches_modulation() {
        let g = grid();
        let x = random_frame(5);
        let s = tx(&x, &g);
        let o = oversampled_oracle(&x, &g, &LosChannel::ideal(0.0, 0.0), 16).unwrap();
        for t in -24i64..256 {
            assert!((o.at(t).unwrap() - s.at(t).unwrap()).norm() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn oracle_matches_fir_for_integer_channels() {
        let g = grid();
        let x = random_frame(6);
        let s = tx(&x, &g);
        let ch = LosChannel::ideal(2.0, 1.0);
        let fir = FirDelayModel::new(0.0, 16).unwrap();
        let a = strip_cpp(&propagate(&s, &ch, &fir, &g).unwrap()).unwrap();
        let b = strip_cpp(&oversampled_oracle(&x, &g, &ch, 16).unwrap()).unwrap();
        for (p, q) in a.samples().iter().zip(b.samples()) {
            assert!((p - q).norm() < 1e-9);
        }
    }

    #[test]
    fn wrap_aware_fir_tracks_the_oracle() {
        let g = grid();
        let x = random_frame(7);
        let s = tx(&x, &g);
        let ch = LosChannel::ideal(1.5, 0.0);
        let o = oversampled_oracle(&x, &g, &ch, 16).unwrap();
        let err = |w: usize, shape: TapShape| {
            let fir = FirDelayModel::with_shape(0.5, w, shape, &g).unwrap();
            relative_rms(&o, &propagate(&s, &ch, &fir, &g).unwrap())
        };
        let (e4, e16) = (err(4, TapShape::WrapAware), err(16, TapShape::WrapAware));
        assert!(e16 < e4, "{e4} {e16}");
        // the lowpass taps miss the wrapped upper half of the band
        assert!(err(16, TapShape::Baseband) > 5.0 * e16);
    }
}
