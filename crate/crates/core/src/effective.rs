//! DAFT-domain effective channel of a single path with fractional delay.
//!
//! Each chirp carrier is split into `C + 1` time segments; a delay of
//! `L = l + iota` samples rotates the samples of segment `q` by
//! `exp(i 2 pi iota q)`. [`EffectiveChannel::exact_f`] evaluates the
//! resulting `N`-term sum `F(m, m')` literally and is the reference for the
//! closed-form sinc envelope in [`envelope_magnitude`]. The envelope in turn
//! yields the early-late gate curve ([`ElgTable`]) used to invert the
//! fractional delay.

use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::channel::LosChannel;
use crate::grid::AfdmGrid;
use crate::math::{cis, pearson, sinc, wrap_centered};
use crate::Complex64;

/// Segment boundaries of chirp carrier `m'`.
///
/// Segment `q` covers times `t_{m',q} <= t < t_{m',q+1}` with `t_{m',0} = 0`
/// and `t_{m',q} = (q N - m') / C` for `q >= 1`; the last segment `C` ends at
/// `N`. Integer sample `n` belongs to the segment containing time `n`, so the
/// segments partition `0 .. N` and segment 0 starts at `n = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentIndex {
    n: usize,
    segments: usize,
    carrier: usize,
}

impl SegmentIndex {
    pub fn new(grid: &AfdmGrid, carrier: usize) -> Self {
        Self { n: grid.n(), segments: grid.segments(), carrier }
    }

    /// Continuous boundary `t_{m',q}`.
    pub fn boundary_time(&self, q: usize) -> f64 {
        if q == 0 {
            0.0
        } else {
            (q * self.n) as f64 / self.segments as f64 - self.carrier as f64 / self.segments as f64
        }
    }

    /// Discrete boundary `n_{m',q} = floor(t_{m',q})`, `q = 0 ..= C`.
    pub fn boundaries(&self) -> Vec<i64> {
        (0..=self.segments)
            .map(|q| {
                if q == 0 {
                    0
                } else {
                    ((q * self.n) as i64 - self.carrier as i64).div_euclid(self.segments as i64)
                }
            })
            .collect()
    }

    /// Segment holding real time `p` in `[0, N)`.
    pub fn segment_of(&self, p: f64) -> usize {
        let q = ((self.segments as f64 * p + self.carrier as f64) / self.n as f64).floor();
        q.clamp(0.0, self.segments as f64) as usize
    }

    /// Indicator of sample `n` in segment `q`.
    pub fn indicator(&self, q: usize, n: usize) -> bool {
        self.segment_of(n as f64) == q
    }

    /// Number of samples in each segment.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.segments + 1];
        for n in 0..self.n {
            sizes[self.segment_of(n as f64)] += 1;
        }
        sizes
    }
}

/// Integer and fractional parts of delay and Doppler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeParams {
    pub l: i64,
    pub iota: f64,
    pub k: i64,
    pub kappa: f64,
}

impl EnvelopeParams {
    pub fn new(l: i64, iota: f64, k: i64, kappa: f64) -> Self {
        Self { l, iota, k, kappa }
    }

    pub fn from_channel(ch: &LosChannel) -> Self {
        Self::new(ch.int_delay(), ch.frac_delay(), ch.int_doppler(), ch.frac_doppler())
    }

    pub fn delay(&self) -> f64 {
        self.l as f64 + self.iota
    }

    pub fn doppler(&self) -> f64 {
        self.k as f64 + self.kappa
    }

    /// Equivalent delay `(K + C L) mod N`.
    pub fn l_eq(&self, grid: &AfdmGrid) -> f64 {
        (self.doppler() + grid.segments() as f64 * self.delay()).rem_euclid(grid.n() as f64)
    }
}

/// Exact effective-channel evaluator for one grid.
#[derive(Clone)]
pub struct EffectiveChannel {
    grid: AfdmGrid,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for EffectiveChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EffectiveChannel").field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl EffectiveChannel {
    pub fn new(grid: &AfdmGrid) -> Self {
        Self { grid: grid.clone(), fft: FftPlanner::new().plan_fft_forward(grid.n()) }
    }

    pub fn grid(&self) -> &AfdmGrid {
        &self.grid
    }

    /// Segment phase `exp(i 2 pi iota q)` of sample `n`, where `q` is the
    /// segment of carrier `m'` holding the delayed index `((n - L))_N`.
    fn segment_phase(&self, seg: &SegmentIndex, p: &EnvelopeParams, n: usize) -> Complex64 {
        let big_n = self.grid.n() as f64;
        let shifted = (n as f64 - p.delay()).rem_euclid(big_n);
        let q = seg.segment_of(shifted);
        cis(p.iota * q as f64)
    }

    /// `F(m, m')` by its direct `N`-term sum.
    pub fn exact_f(&self, p: &EnvelopeParams, m: usize, carrier: usize) -> Complex64 {
        let n = self.grid.n();
        let seg = SegmentIndex::new(&self.grid, carrier);
        let l_eq = p.l_eq(&self.grid);
        let dm = carrier as i64 - m as i64;
        (0..n)
            .map(|t| {
                let lin = ((dm * t as i64).rem_euclid(n as i64)) as f64 / n as f64 - l_eq * t as f64 / n as f64;
                cis(lin) * self.segment_phase(&seg, p, t)
            })
            .sum()
    }

    /// `F(m, m')` for every `m`, computed with one FFT.
    pub fn exact_f_column(&self, p: &EnvelopeParams, carrier: usize) -> Vec<Complex64> {
        let n = self.grid.n();
        let seg = SegmentIndex::new(&self.grid, carrier);
        let l_eq = p.l_eq(&self.grid);
        let mut buf: Vec<Complex64> = (0..n)
            .map(|t| {
                let lin = ((carrier * t) % n) as f64 / n as f64 - l_eq * t as f64 / n as f64;
                cis(lin) * self.segment_phase(&seg, p, t)
            })
            .collect();
        self.fft.process(&mut buf);
        buf
    }

    fn leading_phase(&self, ch: &LosChannel, m: usize, carrier: usize) -> Complex64 {
        let g = &self.grid;
        let l = ch.delay;
        let cycles = g.c1() * l * l - g.c2_cycles(m as i64) + g.c2_cycles(carrier as i64)
            - l * carrier as f64 / g.n() as f64;
        ch.gain * cis(cycles) / g.n() as f64
    }

    /// Effective-channel entry `H[m, m']`.
    pub fn h_eff_entry(&self, ch: &LosChannel, m: usize, carrier: usize) -> Complex64 {
        let p = EnvelopeParams::from_channel(ch);
        self.leading_phase(ch, m, carrier) * self.exact_f(&p, m, carrier)
    }

    /// Column `m'` of the effective channel.
    pub fn h_eff_column(&self, ch: &LosChannel, carrier: usize) -> Vec<Complex64> {
        let p = EnvelopeParams::from_channel(ch);
        self.exact_f_column(&p, carrier)
            .into_iter()
            .enumerate()
            .map(|(m, f)| self.leading_phase(ch, m, carrier) * f)
            .collect()
    }

    /// `H x` with the full effective channel.
    pub fn apply(&self, ch: &LosChannel, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::default(); self.grid.n()];
        for (carrier, &v) in x.iter().enumerate() {
            if v.norm_sqr() == 0.0 {
                continue;
            }
            for (acc, h) in y.iter_mut().zip(self.h_eff_column(ch, carrier)) {
                *acc += h * v;
            }
        }
        y
    }
}

/// `sinc(x) / sinc(x / C)`, with the removable singularities at multiples
/// of `C` replaced by their limits.
fn sinc_ratio(x: f64, c: f64) -> f64 {
    let r = x / c;
    if (r - r.round()).abs() < 1e-9 {
        let j = r.round();
        let num = (std::f64::consts::PI * c * j).cos();
        let den = (std::f64::consts::PI * j).cos();
        return num / den;
    }
    let px = std::f64::consts::PI * x;
    px.sin() / (c * (px / c).sin())
}

/// Closed-form envelope of `|F(m, m')|` and its two factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    /// Periodic sampling sequence `N |sinc(a) / sinc(a / C)|`.
    pub upsilon: f64,
    /// Sinc envelope `|sinc(b / C)|`, in `[0, 1]`.
    pub theta: f64,
    pub value: f64,
}

/// Envelope of `|F(m, m')|` with `a = m' - (m + K + C l)` and
/// `b = m' - (m + l_eq)`, both reduced to `[-N/2, N/2)`.
pub fn envelope_magnitude(grid: &AfdmGrid, p: &EnvelopeParams, m: usize, carrier: usize) -> Envelope {
    let n = grid.n();
    let c = grid.segments() as f64;
    let a = wrap_centered(
        carrier as f64 - (m as f64 + p.doppler() + c * p.l as f64),
        n,
    );
    let b = wrap_centered(carrier as f64 - (m as f64 + p.l_eq(grid)), n);
    let upsilon = n as f64 * sinc_ratio(a, c).abs();
    let theta = sinc(b / c).abs();
    Envelope { upsilon, theta, value: upsilon * theta }
}

/// Agreement between the envelope and the exact sum for one column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fidelity {
    pub exact_peak: usize,
    pub envelope_peak: usize,
    pub correlation: f64,
}

impl Fidelity {
    pub fn peaks_agree(&self) -> bool {
        self.exact_peak == self.envelope_peak
    }
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &x)| if x > best.1 { (i, x) } else { best })
        .0
}

/// One row of a magnitude profile over `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub m: usize,
    pub exact: f64,
    pub upsilon: f64,
    pub theta: f64,
    pub envelope: f64,
}

/// `|F(m, m')|` and the envelope over every `m`.
pub fn magnitude_profile(eff: &EffectiveChannel, p: &EnvelopeParams, carrier: usize) -> Vec<ProfileRow> {
    let exact = eff.exact_f_column(p, carrier);
    exact
        .iter()
        .enumerate()
        .map(|(m, f)| {
            let e = envelope_magnitude(eff.grid(), p, m, carrier);
            ProfileRow { m, exact: f.norm(), upsilon: e.upsilon, theta: e.theta, envelope: e.value }
        })
        .collect()
}

/// Peak positions and Pearson correlation of the two magnitude profiles.
pub fn envelope_fidelity(eff: &EffectiveChannel, p: &EnvelopeParams, carrier: usize) -> Fidelity {
    let rows = magnitude_profile(eff, p, carrier);
    let exact: Vec<f64> = rows.iter().map(|r| r.exact).collect();
    let env: Vec<f64> = rows.iter().map(|r| r.envelope).collect();
    Fidelity {
        exact_peak: argmax(&exact),
        envelope_peak: argmax(&env),
        correlation: pearson(&exact, &env),
    }
}

/// Tabulated early-late gate factor `A(iota)`.
///
/// The early tap is the floor-delay tap and the late tap sits `C` bins
/// further along the equivalent-delay axis; with this orientation `A` falls
/// strictly from positive to negative across `(0, 1)` and crosses zero at
/// `iota = 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElgTable {
    iotas: Vec<f64>,
    values: Vec<f64>,
}

pub const ELG_IOTA_MIN: f64 = 0.01;
pub const ELG_IOTA_MAX: f64 = 0.99;

/// `A(iota) = 10 lg |F(m_E)| - 10 lg |F(m_L)|` from the envelope, for
/// `iota` on `[0.01, 0.99]` in steps of `1e-3`.
pub fn elg_curve(grid: &AfdmGrid) -> ElgTable {
    let n = grid.n();
    let late = (n - grid.segments() % n) % n;
    let (iotas, values) = (10..=990)
        .map(|i| {
            let iota = i as f64 / 1000.0;
            (iota, elg_factor(grid, iota, 0, late))
        })
        .unzip();
    ElgTable { iotas, values }
}

fn elg_factor(grid: &AfdmGrid, iota: f64, early: usize, late: usize) -> f64 {
    let p = EnvelopeParams::new(0, iota, 0, 0.0);
    let e = envelope_magnitude(grid, &p, early, 0).value;
    let l = envelope_magnitude(grid, &p, late, 0).value;
    10.0 * e.log10() - 10.0 * l.log10()
}

impl ElgTable {
    pub fn iotas(&self) -> &[f64] {
        &self.iotas
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// True when `A` falls with `iota`.
    pub fn is_decreasing(&self) -> bool {
        self.values.first() > self.values.last()
    }

    pub fn is_strictly_monotone(&self) -> bool {
        let dec = self.is_decreasing();
        self.values.windows(2).all(|w| if dec { w[1] < w[0] } else { w[1] > w[0] })
    }

    /// Range of tabulated factors, `(min, max)`.
    pub fn range(&self) -> (f64, f64) {
        let (a, b) = (self.values[0], *self.values.last().unwrap());
        (a.min(b), a.max(b))
    }

    /// Piecewise-linear inverse; factors outside the table clamp to the
    /// matching endpoint.
    pub fn invert(&self, factor: f64) -> f64 {
        let dec = self.is_decreasing();
        // key increases along the table
        let key = |v: f64| if dec { -v } else { v };
        let target = key(factor);
        let first = key(self.values[0]);
        let last = key(*self.values.last().unwrap());
        if target.is_nan() {
            return 0.5;
        }
        if target <= first {
            return self.iotas[0];
        }
        if target >= last {
            return *self.iotas.last().unwrap();
        }
        let hi = self.values.partition_point(|&v| key(v) < target);
        let lo = hi - 1;
        let (v0, v1) = (key(self.values[lo]), key(self.values[hi]));
        let t = (target - v0) / (v1 - v0);
        self.iotas[lo] + t * (self.iotas[hi] - self.iotas[lo])
    }
}
