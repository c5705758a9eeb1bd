//! Spatial discretisations of the right-hand side.
//!
//! [`Scheme::Spectral`] differentiates with the Fourier multiplier `ik`, forms
//! the nonlinear products on a grid refined by 2× zero padding (enough for the
//! quartic terms of `rch`) and inverts the Helmholtz operator by its symbol.
//!
//! [`Scheme::TailResolved`] uses the spectral fields on the core of the
//! solution, where `|u| ≥ CORE_THRESHOLD·max|u|` (dilated by [`CORE_DILATION`]
//! cells), and local fields everywhere else: 8th-order centred differences,
//! pointwise products and the exponential-sweep inverse. FFT round-off sits
//! at `1e-16·max|u|` in absolute terms and would swamp exponentially small
//! tails; the local operations resolve them to relative precision, while the
//! spectral core keeps the accuracy a finite-difference core loses once the
//! solution sharpens.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, Grid, GridFunction};
use crate::model::ModelSpec;
use crate::nonlocal::HelmholtzOperator;
use crate::spectral::{self, FourierPair};
use crate::stencil;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Spectral,
    #[default]
    TailResolved,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Spectral => "spectral",
            Scheme::TailResolved => "tail_resolved",
        }
    }
}

/// Relative amplitude below which a node belongs to the tail.
pub const CORE_THRESHOLD: f64 = 1e-3;

/// Cells by which the core mask is widened on each side.
pub const CORE_DILATION: usize = 16;

/// Intermediate fields of one right-hand-side evaluation.
#[derive(Clone, Debug)]
pub struct Parts {
    pub ux: Vec<f64>,
    /// `f'(u)u_x`.
    pub transport: Vec<f64>,
    /// `g(u) + ½f''(u)u_x²`.
    pub h: Vec<f64>,
    /// `∂xΛ⁻²h`.
    pub grad: Vec<f64>,
}

impl Parts {
    pub fn rhs(&self) -> Vec<f64> {
        self.transport
            .iter()
            .zip(&self.grad)
            .map(|(q, g)| -(q + g))
            .collect()
    }

    /// `h` formed node by node from `u` and this scheme's `u_x`. Unlike the
    /// dealiased `h`, it keeps the sign of `g` and `f''` at every node.
    pub fn nodal_h(&self, spec: &ModelSpec, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.ux).map(|(&u, &ux)| spec.h_point(u, ux)).collect()
    }

    /// Name of the first field holding a non-finite value.
    pub fn first_non_finite(&self) -> Option<&'static str> {
        let fields: [(&'static str, &[f64]); 4] = [
            ("u_x", &self.ux),
            ("f'(u)u_x", &self.transport),
            ("h", &self.h),
            ("dx Lambda^-2 h", &self.grad),
        ];
        fields
            .iter()
            .find(|(_, v)| v.iter().any(|x| !x.is_finite()))
            .map(|(name, _)| *name)
    }
}

/// A grid, its Helmholtz operator and the transforms one scheme needs.
#[derive(Clone, Debug)]
pub struct Discretization {
    scheme: Scheme,
    op: HelmholtzOperator,
    padded: FourierPair,
}

impl Discretization {
    pub fn new(grid: Grid, scheme: Scheme) -> Self {
        Self::with_operator(HelmholtzOperator::new(grid), scheme)
    }

    pub fn with_operator(op: HelmholtzOperator, scheme: Scheme) -> Self {
        let padded = FourierPair::new(2 * op.grid().point_count());
        Self { scheme, op, padded }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn grid(&self) -> &Grid {
        self.op.grid()
    }

    pub fn operator(&self) -> &HelmholtzOperator {
        &self.op
    }

    /// `u_x` with this scheme's derivative.
    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        match self.scheme {
            Scheme::Spectral => grid::spectral_derivative_raw(self.op.fourier(), self.grid(), values),
            Scheme::TailResolved => {
                let mut out = vec![0.0; values.len()];
                stencil::periodic_first_derivative(values, self.grid().dx(), &mut out);
                let spectral = grid::spectral_derivative_raw(self.op.fourier(), self.grid(), values);
                for ((o, s), core) in out.iter_mut().zip(spectral).zip(core_mask(values)) {
                    if core {
                        *o = s;
                    }
                }
                out
            }
        }
    }

    /// `(Λ⁻²h, ∂xΛ⁻²h)` with this scheme's inverse.
    pub fn helmholtz_pair(&self, h: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match self.scheme {
            Scheme::Spectral => self.op.symbols_on_coeffs(&self.op.fourier().forward_real(h)),
            Scheme::TailResolved => {
                let (mut plain, mut grad) = self.op.sweep_pair(h);
                let (sp, sg) = self.op.symbols_on_coeffs(&self.op.fourier().forward_real(h));
                for (j, core) in core_mask(h).into_iter().enumerate() {
                    if core {
                        plain[j] = sp[j];
                        grad[j] = sg[j];
                    }
                }
                (plain, grad)
            }
        }
    }

    pub fn parts(&self, spec: &ModelSpec, u: &[f64]) -> Parts {
        match self.scheme {
            Scheme::Spectral => self.spectral_parts(spec, u),
            Scheme::TailResolved => self.blended_parts(spec, u),
        }
    }

    fn blended_parts(&self, spec: &ModelSpec, u: &[f64]) -> Parts {
        let core = core_mask(u);
        let spectral = self.spectral_parts(spec, u);
        let mut ux = vec![0.0; u.len()];
        stencil::periodic_first_derivative(u, self.grid().dx(), &mut ux);
        let mut transport = Vec::with_capacity(u.len());
        let mut h = Vec::with_capacity(u.len());
        for j in 0..u.len() {
            if core[j] {
                ux[j] = spectral.ux[j];
                transport.push(spectral.transport[j]);
                h.push(spectral.h[j]);
            } else {
                transport.push((spec.f_prime)(u[j]) * ux[j]);
                h.push(spec.h_point(u[j], ux[j]));
            }
        }
        let (a, b) = self.op.sweeps(&h);
        let grad = (0..u.len())
            .map(|j| if core[j] { spectral.grad[j] } else { 0.5 * (b[j] - a[j]) })
            .collect();
        Parts { ux, transport, h, grad }
    }

    fn spectral_parts(&self, spec: &ModelSpec, u: &[f64]) -> Parts {
        let n = u.len();
        let pair = self.op.fourier();
        let k = spectral::wavenumbers(self.grid());
        let u_hat = pair.forward_real(u);
        let ux_hat: Vec<_> = u_hat
            .iter()
            .zip(&k)
            .enumerate()
            .map(|(i, (c, &k))| {
                if i == n / 2 {
                    num_complex::Complex64::new(0.0, 0.0)
                } else {
                    c * num_complex::Complex64::new(0.0, k)
                }
            })
            .collect();
        let ux = pair.inverse_real(ux_hat.clone());

        let up = self.padded.inverse_real(spectral::pad_spectrum(&u_hat, 2 * n));
        let uxp = self.padded.inverse_real(spectral::pad_spectrum(&ux_hat, 2 * n));
        let qp: Vec<f64> = up.iter().zip(&uxp).map(|(&u, &ux)| (spec.f_prime)(u) * ux).collect();
        let hp: Vec<f64> = up.iter().zip(&uxp).map(|(&u, &ux)| spec.h_point(u, ux)).collect();
        let q_hat = spectral::truncate_spectrum(&self.padded.forward_real(&qp), n);
        let h_hat = spectral::truncate_spectrum(&self.padded.forward_real(&hp), n);

        let transport = pair.inverse_real(q_hat);
        let (_, grad) = self.op.symbols_on_coeffs(&h_hat);
        let h = pair.inverse_real(h_hat);
        Parts { ux, transport, h, grad }
    }

    /// `du/dt = −f'(u)u_x − ∂xΛ⁻²h` as a checked grid function.
    pub fn rhs(&self, spec: &ModelSpec, u: &GridFunction) -> Result<GridFunction> {
        self.grid().ensure_same(u.grid())?;
        let parts = self.parts(spec, u.values());
        if let Some(field) = parts.first_non_finite() {
            let values: &[f64] = match field {
                "u_x" => &parts.ux,
                "f'(u)u_x" => &parts.transport,
                "h" => &parts.h,
                _ => &parts.grad,
            };
            let index = values.iter().position(|v| !v.is_finite()).unwrap_or(0);
            return Err(Error::NonFinite {
                context: format!("rhs field {field}"),
                index,
            });
        }
        GridFunction::new(*self.grid(), parts.rhs())
    }
}

/// Nodes within [`CORE_DILATION`] cells of a node where
/// `|u| ≥ CORE_THRESHOLD·max|u|`, periodically.
pub fn core_mask(u: &[f64]) -> Vec<bool> {
    let n = u.len();
    let max = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut mask = vec![false; n];
    if max == 0.0 {
        return mask;
    }
    let k = CORE_DILATION.min(n / 2);
    for (j, v) in u.iter().enumerate() {
        if v.abs() >= CORE_THRESHOLD * max {
            for d in 0..=2 * k {
                mask[(j + n + d - k) % n] = true;
            }
        }
    }
    mask
}
