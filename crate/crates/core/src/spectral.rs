//! FFT plumbing shared by the grid and nonlocal operators.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

/// Forward/inverse complex FFT pair of a fixed length. Cheap to clone.
#[derive(Clone)]
pub struct FourierPair {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FourierPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPair").field("n", &self.n).finish()
    }
}

impl FourierPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalised forward transform of real samples.
    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform normalised by `1/n`, returning the real part.
    pub fn inverse_real(&self, mut coeffs: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut coeffs);
        let scale = 1.0 / self.n as f64;
        coeffs.into_iter().map(|c| c.re * scale).collect()
    }
}

/// Angular wavenumbers in FFT order for a periodic grid of length `2L`.
/// The Nyquist entry (index `N/2`) is reported with a positive sign.
pub fn wavenumbers(grid: &Grid) -> Vec<f64> {
    let n = grid.point_count();
    let base = std::f64::consts::PI / grid.half_length();
    (0..n)
        .map(|i| {
            let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
            m * base
        })
        .collect()
}

/// The grid-node phase `e^{-i k x_0}` is absorbed by working with node index
/// `j` instead of position; multipliers that depend only on `k` commute with it.
pub(crate) fn apply_multiplier(
    pair: &FourierPair,
    values: &[f64],
    multiplier: impl Fn(usize) -> Complex64,
) -> Vec<f64> {
    let mut coeffs = pair.forward_real(values);
    for (i, c) in coeffs.iter_mut().enumerate() {
        *c *= multiplier(i);
    }
    pair.inverse_real(coeffs)
}

/// Zero-pad a length-`n` spectrum to length `m > n`, splitting the Nyquist bin.
/// Rescaled so the inverse transform of length `m` interpolates the samples.
pub(crate) fn pad_spectrum(coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = coeffs.len();
    let half = n / 2;
    let scale = m as f64 / n as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..half {
        out[i] = coeffs[i] * scale;
    }
    for i in half + 1..n {
        out[m - (n - i)] = coeffs[i] * scale;
    }
    out[half] = coeffs[half] * (0.5 * scale);
    out[m - half] = coeffs[half] * (0.5 * scale);
    out
}

/// Keep the lowest `n` modes of a length-`m` spectrum; the Nyquist bin is dropped.
pub(crate) fn truncate_spectrum(coeffs: &[Complex64], n: usize) -> Vec<Complex64> {
    let m = coeffs.len();
    let half = n / 2;
    let scale = n as f64 / m as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..half {
        out[i] = coeffs[i] * scale;
    }
    for i in half + 1..n {
        out[i] = coeffs[m - (n - i)] * scale;
    }
    out
}
