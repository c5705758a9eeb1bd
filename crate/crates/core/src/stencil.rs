//! Local high-order stencils on uniform grids: centred finite differences and
//! cell quadrature weights built from 8-point Lagrange interpolants.
//!
//! Everything here acts pointwise or on short windows, so a field that decays
//! exponentially keeps its relative accuracy in the tails. That is the property
//! the FFT-based operators lack (their round-off is global).

/// Number of nodes in every interpolation stencil.
pub const STENCIL_LEN: usize = 8;

/// Offsets of the centred stencil for the cell `[x_j, x_{j+1}]`.
pub const CENTRED_OFFSETS: [i64; STENCIL_LEN] = [-3, -2, -1, 0, 1, 2, 3, 4];

const D1_COEFFS: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const D2_CENTRE: f64 = -205.0 / 72.0;
const D2_COEFFS: [f64; 4] = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

#[inline]
fn wrap(j: usize, offset: isize, n: usize) -> usize {
    (j as isize + offset).rem_euclid(n as isize) as usize
}

/// Eighth-order centred first derivative with periodic wrap.
pub fn periodic_first_derivative(values: &[f64], dx: f64, out: &mut [f64]) {
    let n = values.len();
    debug_assert_eq!(out.len(), n);
    let inv = 1.0 / dx;
    for j in 0..n {
        let mut acc = 0.0;
        for (k, c) in D1_COEFFS.iter().enumerate() {
            let s = k as isize + 1;
            acc += c * (values[wrap(j, s, n)] - values[wrap(j, -s, n)]);
        }
        out[j] = acc * inv;
    }
}

/// Eighth-order centred second derivative with periodic wrap.
pub fn periodic_second_derivative(values: &[f64], dx: f64, out: &mut [f64]) {
    let n = values.len();
    debug_assert_eq!(out.len(), n);
    let inv = 1.0 / (dx * dx);
    for j in 0..n {
        let mut acc = D2_CENTRE * values[j];
        for (k, c) in D2_COEFFS.iter().enumerate() {
            let s = k as isize + 1;
            acc += c * (values[wrap(j, s, n)] + values[wrap(j, -s, n)]);
        }
        out[j] = acc * inv;
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..(order + 1) / 2 {
        // Tricomi initial guess, refined by Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let (p, pm1) = if order == 1 { (z, 1.0) } else { (p1, p0) };
            dp = n * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = 0.5 * (1.0 - z);
        nodes[order - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[order - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn lagrange_basis(offsets: &[i64; STENCIL_LEN], tau: f64) -> [f64; STENCIL_LEN] {
    let mut out = [0.0; STENCIL_LEN];
    for (m, &om) in offsets.iter().enumerate() {
        let mut l = 1.0;
        for (k, &ok) in offsets.iter().enumerate() {
            if k != m {
                l *= (tau - ok as f64) / (om - ok) as f64;
            }
        }
        out[m] = l;
    }
    out
}

/// Weights `w_m` such that `∫_0^h kernel(s) f(s) ds ≈ Σ_m w_m f(offsets[m]·h)`
/// for the cell `[0, h]`, exact when `f` is a polynomial of degree ≤ 7.
pub fn cell_weights(
    offsets: &[i64; STENCIL_LEN],
    h: f64,
    kernel: impl Fn(f64) -> f64,
) -> [f64; STENCIL_LEN] {
    let (nodes, gw) = gauss_legendre_unit(32);
    let mut out = [0.0; STENCIL_LEN];
    for (tau, w) in nodes.iter().zip(&gw) {
        let basis = lagrange_basis(offsets, *tau);
        let k = kernel(tau * h) * w * h;
        for m in 0..STENCIL_LEN {
            out[m] += k * basis[m];
        }
    }
    out
}

/// Offsets for the cell starting at node `j` on a non-periodic index range
/// `0..n`, shifted inward near the ends so that every node exists.
pub fn clamped_offsets(j: usize, n: usize) -> [i64; STENCIL_LEN] {
    let lo = (j as i64 - 3).clamp(0, n as i64 - STENCIL_LEN as i64);
    let mut out = [0i64; STENCIL_LEN];
    for (m, o) in out.iter_mut().enumerate() {
        *o = lo + m as i64 - j as i64;
    }
    out
}

/// Cumulative integrals of a sampled function on a non-periodic uniform grid.
///
/// Returns `I` with `I[j] = ∫_{x_j}^{x_{n-1}} f` (integrated from the right end
/// inward) when `from_right` is true, and `I[j] = ∫_{x_0}^{x_j} f` otherwise.
pub fn cumulative_integral(values: &[f64], dx: f64, from_right: bool) -> Vec<f64> {
    let n = values.len();
    assert!(n >= STENCIL_LEN, "need at least {STENCIL_LEN} samples");
    let interior = cell_weights(&CENTRED_OFFSETS, dx, |_| 1.0);
    let cell = |j: usize| -> f64 {
        let offsets = clamped_offsets(j, n);
        let w = if offsets == CENTRED_OFFSETS {
            interior
        } else {
            cell_weights(&offsets, dx, |_| 1.0)
        };
        offsets
            .iter()
            .zip(w.iter())
            .map(|(o, w)| w * values[(j as i64 + o) as usize])
            .sum()
    };
    let mut out = vec![0.0; n];
    if from_right {
        for j in (0..n - 1).rev() {
            out[j] = out[j + 1] + cell(j);
        }
    } else {
        for j in 1..n {
            out[j] = out[j - 1] + cell(j - 1);
        }
    }
    out
}

/// Local Lagrange interpolation (8 nearest nodes, periodic) at an arbitrary
/// point `x` of a periodic grid with first node `x0` and spacing `dx`.
pub fn periodic_interpolate(values: &[f64], x0: f64, dx: f64, x: f64) -> f64 {
    let n = values.len();
    let s = (x - x0) / dx;
    let j = s.floor();
    let tau = s - j;
    let basis = lagrange_basis(&CENTRED_OFFSETS, tau);
    let j = j as i64;
    CENTRED_OFFSETS
        .iter()
        .zip(basis.iter())
        .map(|(o, b)| b * values[(j + o).rem_euclid(n as i64) as usize])
        .sum()
}
