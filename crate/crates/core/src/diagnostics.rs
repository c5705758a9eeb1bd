//! Fields and functionals of a solution: `h`, `F`, the conserved energy, the
//! time-averaged source `σ`, its exponential moments `λ±`, the tails `ε±`,
//! the asymptotic profile decomposition, decay envelopes and weighted norms.
//!
//! Sign convention: `ε±` are reported as nonnegative magnitudes,
//! `ε₊(x) = ½∫_x^∞ (e^y + e^{2x−y}) σ dy` and `ε₋(x) = ½∫_{−∞}^x (e^{−y} + e^{y−2x}) σ dy`,
//! so that for `x ≥ 0`
//!
//! ```text
//! u(t,x) = u₀(x) − ∫₀ᵗ f'(u)u_x dτ + t e^{−x} (λ₊(t) − ε₊(t,x))
//! ```
//!
//! and symmetrically `… − t e^{x} (λ₋(t) − ε₋(t,x))` for `x < 0`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{Checkpoint, Trajectory};
use crate::grid::{compensated_sum, integrate, lp_norm_raw, spectral_derivative, Grid, GridFunction};
use crate::model::ModelSpec;
use crate::nonlocal::{grad_helmholtz_inverse, HelmholtzOperator};
use crate::stencil;
use crate::weights::Weight;

/// Cells whose `|u| + |u_x|` falls below this are masked out of envelopes.
pub const ENVELOPE_MASK: f64 = 1e-250;

/// `g(u) + ½f''(u)u_x²` with spectral `u_x`.
pub fn h_field(spec: &ModelSpec, u: &GridFunction) -> Result<GridFunction> {
    let ux = spectral_derivative(u)?;
    u.zip_map(&ux, |u, ux| spec.h_point(u, ux))
}

/// `∂xΛ⁻² h` with `h` from [`h_field`].
pub fn f_field(spec: &ModelSpec, op: &HelmholtzOperator, u: &GridFunction) -> Result<GridFunction> {
    grad_helmholtz_inverse(op, &h_field(spec, u)?)
}

/// `∫(u² + u_x²)` with spectral `u_x`.
pub fn energy(u: &GridFunction) -> f64 {
    let ux = match spectral_derivative(u) {
        Ok(ux) => ux,
        Err(_) => return f64::NAN,
    };
    let dx = u.grid().dx();
    dx * compensated_sum(u.values().iter().zip(ux.values()).map(|(a, b)| a * a + b * b))
}

/// `σ(t,·) = (1/t)∫₀ᵗ h_τ dτ`, and `h₀` at `t = 0`.
pub fn sigma_field(traj: &Trajectory, t: f64) -> Result<GridFunction> {
    sigma_at(traj, traj.checkpoint(t)?)
}

fn sigma_at(traj: &Trajectory, c: &Checkpoint) -> Result<GridFunction> {
    if c.step == 0 {
        // The same h the accumulator starts from (the trajectory's derivative).
        c.u.zip_map(&c.ux, |u, ux| traj.spec.h_point(u, ux))
    } else {
        let inv = 1.0 / c.t;
        c.h_accumulator.map(|v| v * inv)
    }
}

/// Relative size, within the outermost unit band `|y| ≥ L − 1`, that a
/// moment integrand may have before [`lambda_pm`] refuses.
pub const MOMENT_GUARD: f64 = 1e-12;

fn moment_integrands(sigma: &GridFunction) -> (Vec<f64>, Vec<f64>) {
    let g = sigma.grid();
    let plus = g.nodes().zip(sigma.values()).map(|(y, s)| y.exp() * s).collect();
    let minus = g.nodes().zip(sigma.values()).map(|(y, s)| (-y).exp() * s).collect();
    (plus, minus)
}

fn guard(grid: &Grid, integrand: &[f64], label: &str) -> Result<()> {
    let max = integrand.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return Ok(());
    }
    let l = grid.half_length();
    let edge = grid
        .nodes()
        .zip(integrand)
        .filter(|(y, _)| y.abs() >= l - 1.0)
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    if edge > MOMENT_GUARD * max {
        return Err(Error::BoundaryContamination(format!(
            "{label}: integrand reaches {:.3e} of its maximum within one unit of ±L",
            edge / max
        )));
    }
    Ok(())
}

fn lambda_from_sigma(sigma: &GridFunction) -> Result<(f64, f64)> {
    let (plus, minus) = moment_integrands(sigma);
    guard(sigma.grid(), &plus, "e^y sigma")?;
    guard(sigma.grid(), &minus, "e^-y sigma")?;
    let dx = sigma.grid().dx();
    Ok((0.5 * dx * compensated_sum(plus), 0.5 * dx * compensated_sum(minus)))
}

/// `λ±(t) = ½∫ e^{±y} σ(t,y) dy`.
pub fn lambda_pm(traj: &Trajectory, t: f64) -> Result<(f64, f64)> {
    lambda_from_sigma(&sigma_field(traj, t)?)
}

/// `ε₊` on `x ≥ 0` and `ε₋` on `x < 0` (zero on the other half), by
/// cumulative quadrature from the nearer boundary inward.
pub fn epsilon_pm(traj: &Trajectory, t: f64) -> Result<(GridFunction, GridFunction)> {
    let sigma = sigma_field(traj, t)?;
    epsilon_from_sigma(&sigma)
}

fn epsilon_from_sigma(sigma: &GridFunction) -> Result<(GridFunction, GridFunction)> {
    let g = *sigma.grid();
    let (plus, minus) = moment_integrands(sigma);
    guard(&g, &plus, "e^y sigma")?;
    guard(&g, &minus, "e^-y sigma")?;
    let n = g.point_count();
    let dx = g.dx();
    let l = g.half_length();
    // Close the period: node N sits at +L and carries σ(−L).
    let mut s = sigma.values().to_vec();
    s.push(sigma.values()[0]);
    let y = |j: usize| -l + j as f64 * dx;
    let ep: Vec<f64> = (0..=n).map(|j| y(j).exp() * s[j]).collect();
    let em: Vec<f64> = (0..=n).map(|j| (-y(j)).exp() * s[j]).collect();
    let ep_right = stencil::cumulative_integral(&ep, dx, true);
    let em_right = stencil::cumulative_integral(&em, dx, true);
    let ep_left = stencil::cumulative_integral(&ep, dx, false);
    let em_left = stencil::cumulative_integral(&em, dx, false);
    let mut eps_plus = vec![0.0; n];
    let mut eps_minus = vec![0.0; n];
    for j in 0..n {
        let x = y(j);
        if x >= 0.0 {
            eps_plus[j] = 0.5 * (ep_right[j] + (2.0 * x).exp() * em_right[j]);
        } else {
            eps_minus[j] = 0.5 * (em_left[j] + (-2.0 * x).exp() * ep_left[j]);
        }
    }
    Ok((GridFunction::new(g, eps_plus)?, GridFunction::new(g, eps_minus)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub x_window: [f64; 2],
    pub relative_error: f64,
}

#[derive(Clone, Debug)]
pub struct ProfileReport {
    pub t: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub epsilon_plus: GridFunction,
    pub epsilon_minus: GridFunction,
    /// `𝓡(t,·) = −∫₀ᵗ f'(u)u_x dτ`.
    pub r_field: GridFunction,
    /// Snapshot minus the reconstruction from `u₀`, `𝓡`, `λ±`, `ε±`.
    pub identity_residual: GridFunction,
    pub residual_max: f64,
    pub tail_fit: Option<TailFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub t: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub residual_max: f64,
    pub tail_relative_error: Option<f64>,
}

impl ProfileReport {
    pub fn summary(&self) -> ProfileSummary {
        ProfileSummary {
            t: self.t,
            lambda_plus: self.lambda_plus,
            lambda_minus: self.lambda_minus,
            residual_max: self.residual_max,
            tail_relative_error: self.tail_fit.as_ref().map(|f| f.relative_error),
        }
    }

    /// Columns `x, epsilon_plus, epsilon_minus, r_field, identity_residual`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "epsilon_plus", "epsilon_minus", "r_field", "identity_residual"])?;
        let g = self.r_field.grid();
        for (j, x) in g.nodes().enumerate() {
            w.write_record([
                format!("{x:.16e}"),
                format!("{:.16e}", self.epsilon_plus.values()[j]),
                format!("{:.16e}", self.epsilon_minus.values()[j]),
                format!("{:.16e}", self.r_field.values()[j]),
                format!("{:.16e}", self.identity_residual.values()[j]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Largest `|x|` at which the datum is nonzero (its numerical support radius).
pub fn support_radius(u0: &GridFunction) -> f64 {
    u0.grid()
        .nodes()
        .zip(u0.values())
        .filter(|(_, v)| **v != 0.0)
        .fold(0.0, |m, (x, _)| m.max(x.abs()))
}

/// Decompose `u(t,·)` into datum, transport remainder and tail profile.
///
/// The tail fit compares `u(t,x)e^x/t` with `λ₊(t) − ε₊(t,x)` on
/// `[x₀ + 5, L − 10]`, `x₀` the support radius of the datum (absent if empty).
pub fn profile_decompose(traj: &Trajectory, t: f64) -> Result<ProfileReport> {
    let c = traj.checkpoint(t)?;
    if c.step == 0 {
        return Err(Error::InvalidParameter {
            name: "t".into(),
            reason: "the profile decomposition needs t > 0".into(),
        });
    }
    let g = traj.grid;
    let sigma = sigma_at(traj, c)?;
    let (lambda_plus, lambda_minus) = lambda_from_sigma(&sigma)?;
    let (eps_plus, eps_minus) = epsilon_from_sigma(&sigma)?;
    let u0 = &traj.initial().u;
    let r_field = c.r_accumulator.map(|v| -v)?;
    let tt = c.t;
    let residual: Vec<f64> = (0..g.point_count())
        .map(|j| {
            let x = g.node(j);
            let tail = if x >= 0.0 {
                tt * (-x).exp() * (lambda_plus - eps_plus.values()[j])
            } else {
                -tt * x.exp() * (lambda_minus - eps_minus.values()[j])
            };
            c.u.values()[j] - (u0.values()[j] + r_field.values()[j] + tail)
        })
        .collect();
    let identity_residual = GridFunction::new(g, residual)?;
    let residual_max = identity_residual.max_abs();

    let x0 = support_radius(u0);
    let window = [x0 + 5.0, g.half_length() - 10.0];
    let tail_fit = (window[0] < window[1] && lambda_plus > 0.0).then(|| {
        let mut worst = 0.0f64;
        for (j, x) in g.nodes().enumerate() {
            if x < window[0] || x > window[1] {
                continue;
            }
            let model = lambda_plus - eps_plus.values()[j];
            let observed = c.u.values()[j] * x.exp() / tt;
            worst = worst.max(((observed - model) / model).abs());
        }
        TailFit {
            x_window: window,
            relative_error: worst,
        }
    });
    Ok(ProfileReport {
        t: c.t,
        lambda_plus,
        lambda_minus,
        epsilon_plus: eps_plus,
        epsilon_minus: eps_minus,
        r_field,
        identity_residual,
        residual_max,
        tail_fit,
    })
}

#[derive(Clone, Debug)]
pub struct DecayEnvelope {
    pub d: f64,
    pub envelope_values: GridFunction,
    pub sup_value: f64,
    pub argmax_x: f64,
    /// The supremum sits in the outer 5% of the domain: the envelope is still
    /// growing where the grid ends.
    pub boundary_dominated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSummary {
    pub d: f64,
    pub sup_value: f64,
    pub argmax_x: f64,
    pub boundary_dominated: bool,
}

impl DecayEnvelope {
    pub fn summary(&self) -> EnvelopeSummary {
        EnvelopeSummary {
            d: self.d,
            sup_value: self.sup_value,
            argmax_x: self.argmax_x,
            boundary_dominated: self.boundary_dominated,
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        self.envelope_values.write_csv(writer)
    }
}

/// The envelope weight `e^{|x|/2}(1+|x|)^{1/2}(ln(1+|x|))^d`.
pub fn envelope_weight(x: f64, d: f64) -> f64 {
    let a = x.abs();
    (0.5 * a).exp() * (1.0 + a).sqrt() * a.ln_1p().powf(d)
}

/// `e^{|x|/2}(1+|x|)^{1/2}(ln(1+|x|))^d (|u| + |u_x|)`, masked below [`ENVELOPE_MASK`].
pub fn decay_envelope(u: &GridFunction, ux: &GridFunction, d: f64) -> Result<DecayEnvelope> {
    if !(d > 0.5) {
        return Err(Error::InvalidParameter {
            name: "d".into(),
            reason: format!("envelope exponent must exceed 1/2, got {d}"),
        });
    }
    u.grid().ensure_same(ux.grid())?;
    let g = *u.grid();
    let values: Vec<f64> = g
        .nodes()
        .zip(u.values().iter().zip(ux.values()))
        .map(|(x, (u, ux))| {
            let s = u.abs() + ux.abs();
            if s < ENVELOPE_MASK {
                0.0
            } else {
                envelope_weight(x, d) * s
            }
        })
        .collect();
    let (jmax, sup_value) = values
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(jm, m), (j, &v)| if v > m { (j, v) } else { (jm, m) });
    let argmax_x = g.node(jmax);
    Ok(DecayEnvelope {
        d,
        envelope_values: GridFunction::new(g, values)?,
        sup_value,
        argmax_x,
        boundary_dominated: sup_value > 0.0 && argmax_x.abs() >= 0.95 * g.half_length(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub t: f64,
    /// `‖φu‖_p + ‖φu_x‖_p`.
    pub norm: f64,
    pub ratio: f64,
    /// Running maximum of `ratio`.
    pub kappa_hat: f64,
    /// `‖φ^{1/2}u‖₂ + ‖φ^{1/2}u_x‖₂`.
    pub half_weight_l2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSeries {
    pub weight: String,
    pub p: f64,
    pub points: Vec<WeightedPoint>,
}

impl WeightedSeries {
    pub fn kappa_hat(&self) -> f64 {
        self.points.last().map_or(1.0, |p| p.kappa_hat)
    }
}

fn weighted_norms(w: &Weight, c: &Checkpoint, p: f64) -> Result<(f64, f64)> {
    let g = c.u.grid();
    let dx = g.dx();
    let phi: Vec<f64> = g.nodes().map(|x| w.phi(x)).collect();
    let prod = |f: &GridFunction, pow: f64| -> Vec<f64> {
        f.values().iter().zip(&phi).map(|(v, w)| v * w.powf(pow)).collect()
    };
    let norm = lp_norm_raw(&prod(&c.u, 1.0), dx, p)? + lp_norm_raw(&prod(&c.ux, 1.0), dx, p)?;
    let half = lp_norm_raw(&prod(&c.u, 0.5), dx, 2.0)? + lp_norm_raw(&prod(&c.ux, 0.5), dx, 2.0)?;
    Ok((norm, half))
}

/// Weighted norms at every checkpoint and the running growth factor `κ̂(t)`.
pub fn weighted_persistence(traj: &Trajectory, w: &Weight, p: f64) -> Result<WeightedSeries> {
    if p.is_nan() || p < 2.0 {
        return Err(Error::InvalidParameter {
            name: "p".into(),
            reason: format!("weighted persistence needs p in [2, inf], got {p}"),
        });
    }
    let (n0, h0) = weighted_norms(w, traj.initial(), p)?;
    if !n0.is_finite() || !h0.is_finite() {
        return Err(Error::Hypothesis(format!(
            "weighted norm of the datum is not finite for weight `{}`",
            w.name()
        )));
    }
    let mut kappa: f64 = 1.0;
    let mut points = Vec::with_capacity(traj.checkpoints.len());
    for c in &traj.checkpoints {
        let (norm, half) = weighted_norms(w, c, p)?;
        let ratio = if n0 == 0.0 { 1.0 } else { norm / n0 };
        kappa = kappa.max(ratio);
        points.push(WeightedPoint {
            t: c.t,
            norm,
            ratio,
            kappa_hat: kappa,
            half_weight_l2: half,
        });
    }
    Ok(WeightedSeries {
        weight: w.name().to_string(),
        p,
        points,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConstantM {
    pub sup_u: f64,
    pub sup_ux: f64,
    pub sup_f_u: f64,
    pub sup_fp_u: f64,
    pub sup_fpp_u: f64,
    pub m: f64,
}

/// Suprema over checkpoints of `‖u‖∞, ‖u_x‖∞, ‖f(u)‖∞, ‖f'(u)‖∞, ‖f''(u)‖∞` and their sum.
pub fn bound_constant_m(traj: &Trajectory) -> BoundConstantM {
    let spec = &traj.spec;
    let sup = |c: &Checkpoint, f: &dyn Fn(f64) -> f64| c.u.values().iter().fold(0.0f64, |m, &v| m.max(f(v).abs()));
    let mut out = BoundConstantM {
        sup_u: 0.0,
        sup_ux: 0.0,
        sup_f_u: 0.0,
        sup_fp_u: 0.0,
        sup_fpp_u: 0.0,
        m: 0.0,
    };
    for c in &traj.checkpoints {
        out.sup_u = out.sup_u.max(c.u.max_abs());
        out.sup_ux = out.sup_ux.max(c.ux.max_abs());
        out.sup_f_u = out.sup_f_u.max(sup(c, &*spec.f));
        out.sup_fp_u = out.sup_fp_u.max(sup(c, &*spec.f_prime));
        out.sup_fpp_u = out.sup_fpp_u.max(sup(c, &*spec.f_second));
    }
    out.m = out.sup_u + out.sup_ux + out.sup_f_u + out.sup_fp_u + out.sup_fpp_u;
    out
}

/// `R` decay diagnostic: least-squares slope of `ln|𝓡(t,x) e^{|x|}/t|`
/// against `ln(1+|x|)` on `x ∈ [a, b]`. Reported, never asserted.
pub fn remainder_decay_exponent(report: &ProfileReport, a: f64, b: f64) -> Option<f64> {
    let g = report.r_field.grid();
    let pts: Vec<(f64, f64)> = g
        .nodes()
        .zip(report.r_field.values())
        .filter(|(x, r)| *x >= a && *x <= b && **r != 0.0)
        .map(|(x, r)| ((1.0 + x).ln(), (r.abs() * x.exp() / report.t).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Mean of a field (`∫u / 2L`), handy for conservation checks of `∫u`.
pub fn mean(u: &GridFunction) -> f64 {
    integrate(u) / (2.0 * u.grid().half_length())
}
