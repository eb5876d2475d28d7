//! Frame containers for the chirp domain and the time domain.

use serde::{Deserialize, Serialize};

use crate::error::{AfdmError, Result};
use crate::Complex64;

/// `N` chirp-domain symbols: `x[m']` on transmit, `y[m]` after demodulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaftFrame {
    symbols: Vec<Complex64>,
}

impl DaftFrame {
    pub fn new(symbols: Vec<Complex64>) -> Self {
        Self { symbols }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    /// Unit impulse at index `m`.
    pub fn impulse(n: usize, m: usize) -> Self {
        let mut f = Self::zeros(n);
        f.symbols[m] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn symbols_mut(&mut self) -> &mut [Complex64] {
        &mut self.symbols
    }

    pub fn into_symbols(self) -> Vec<Complex64> {
        self.symbols
    }

    pub fn energy(&self) -> f64 {
        crate::math::norm_sqr(&self.symbols)
    }

    pub(crate) fn expect_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(AfdmError::LengthMismatch { expected: n, actual: self.len() });
        }
        Ok(())
    }
}

/// Time-domain samples, optionally preceded by a chirp-periodic prefix.
///
/// Sample index `n = 0` is the first sample after the prefix, so the stored
/// vector covers `n = -cpp_len .. N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeFrame {
    samples: Vec<Complex64>,
    cpp_len: usize,
}

impl TimeFrame {
    pub fn new(samples: Vec<Complex64>, cpp_len: usize) -> Result<Self> {
        if cpp_len > samples.len() {
            return Err(AfdmError::InvalidParameter(format!(
                "prefix length {cpp_len} exceeds frame length {}",
                samples.len()
            )));
        }
        Ok(Self { samples, cpp_len })
    }

    /// Frame without a prefix.
    pub fn body(samples: Vec<Complex64>) -> Self {
        Self { samples, cpp_len: 0 }
    }

    pub fn cpp_len(&self) -> usize {
        self.cpp_len
    }

    /// Number of post-prefix samples.
    pub fn body_len(&self) -> usize {
        self.samples.len() - self.cpp_len
    }

    /// All stored samples, prefix first.
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    /// Post-prefix samples `n = 0 .. N`.
    pub fn body_samples(&self) -> &[Complex64] {
        &self.samples[self.cpp_len..]
    }

    /// Sample at signed index `n` (negative indices address the prefix).
    pub fn at(&self, n: i64) -> Option<Complex64> {
        let idx = n + self.cpp_len as i64;
        if idx < 0 {
            return None;
        }
        self.samples.get(idx as usize).copied()
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub(crate) fn expect_body(&self, n: usize) -> Result<()> {
        if self.cpp_len != 0 {
            return Err(AfdmError::PrefixPresent(self.cpp_len));
        }
        if self.samples.len() != n {
            return Err(AfdmError::LengthMismatch { expected: n, actual: self.samples.len() });
        }
        Ok(())
    }
}
