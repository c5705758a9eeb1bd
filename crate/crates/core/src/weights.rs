//! Weight functions `φ` with moderating functions `v`, their sampled property
//! checks, the truncations `φ_N = min(φ, N)` and a discrete weighted Young
//! inequality.
//!
//! Properties are verified by deterministic sampling, never proved: a report
//! that passes only says no violation was seen on the recorded point set.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{compensated_sum, lp_norm_raw, GridFunction};
use crate::stencil;

pub type WeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Relative slack allowed on every sampled inequality.
pub const SLACK: f64 = 1e-9;

#[derive(Clone)]
pub struct Weight {
    name: String,
    phi: WeightFn,
    phi_prime: Option<WeightFn>,
    v: WeightFn,
    a: f64,
    c0: f64,
    inf_v: f64,
    kernel_v_l1: f64,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Weight")
            .field("name", &self.name)
            .field("A", &self.a)
            .field("c0", &self.c0)
            .field("inf_v", &self.inf_v)
            .field("kernel_v_l1", &self.kernel_v_l1)
            .finish()
    }
}

fn arc(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> WeightFn {
    Arc::new(f)
}

fn invalid(name: &str, reason: String) -> Error {
    Error::InvalidParameter {
        name: name.into(),
        reason,
    }
}

impl Weight {
    /// A weight from its parts; `‖e^{−|·|}v‖₁` is computed by quadrature on
    /// `[−80, 80]`. Without `phi_prime`, difference quotients are used.
    pub fn custom(
        name: impl Into<String>,
        phi: WeightFn,
        phi_prime: Option<WeightFn>,
        v: WeightFn,
        a: f64,
        c0: f64,
        inf_v: f64,
    ) -> Self {
        let kernel_v_l1 = kernel_integral(&*v, 0.0, 80.0);
        Self {
            name: name.into(),
            phi,
            phi_prime,
            v,
            a,
            c0,
            inf_v,
            kernel_v_l1,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    pub fn v(&self, x: f64) -> f64 {
        (self.v)(x)
    }

    /// `φ'(x)`: closed form when known, otherwise a centred difference
    /// quotient, one-sided within `1e-3` of the kink at 0.
    pub fn phi_prime(&self, x: f64) -> f64 {
        if let Some(d) = &self.phi_prime {
            return d(x);
        }
        let h = 1e-6;
        if x.abs() < 1e-3 {
            let s = if x >= 0.0 { 1.0 } else { -1.0 };
            s * (self.phi(x + s * h) - self.phi(x)) / h
        } else {
            (self.phi(x + h) - self.phi(x - h)) / (2.0 * h)
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn inf_v(&self) -> f64 {
        self.inf_v
    }

    pub fn kernel_v_l1(&self) -> f64 {
        self.kernel_v_l1
    }

    /// `φ` sampled on the nodes of a grid.
    pub fn sample(&self, u: &GridFunction) -> Vec<f64> {
        u.grid().nodes().map(|x| self.phi(x)).collect()
    }
}

/// Composite 16-point Gauss–Legendre quadrature of `e^{−|x|} v(x)` over
/// `a ≤ |x| ≤ b`, both signs.
pub fn kernel_integral(v: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = stencil::gauss_legendre_unit(16);
    let panel = 0.25;
    let panels = ((b - a) / panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut terms = Vec::with_capacity(panels * 32);
    for k in 0..panels {
        let lo = a + k as f64 * h;
        for (t, w) in nodes.iter().zip(&weights) {
            let x = lo + t * h;
            let e = (-x).exp();
            terms.push(w * h * e * v(x));
            terms.push(w * h * e * v(-x));
        }
    }
    compensated_sum(terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogName {
    ExpHalf,
    ExpA,
    PolyB,
    PaperEnvelopeD,
}

impl std::str::FromStr for CatalogName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp_half" => Ok(Self::ExpHalf),
            "exp_a" => Ok(Self::ExpA),
            "poly_b" => Ok(Self::PolyB),
            "paper_envelope_d" => Ok(Self::PaperEnvelopeD),
            other => Err(invalid("weight", format!("unknown catalog weight `{other}`"))),
        }
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Catalog weights, all self-moderating (`v = φ`, `c₀ = 1`, `inf v = 1`):
///
/// * `exp_half`: `e^{|x|/2}`, `A = ½`.
/// * `exp_a(a)`, `0 < a < 1`: `e^{a|x|}`, `A = a`.
/// * `poly_b(b)`, `b ≥ 0`: `(1+|x|)^b`, `A = b`.
/// * `paper_envelope_d(d)`, `d > ½`: `e^{|x|/2}(1+|x|)^{1/2}(ln(e+|x|))^d`,
///   `A = 1 + d/e`. Each factor is sub-multiplicative, hence so is the product.
pub fn catalog(name: CatalogName, param: Option<f64>) -> Result<Weight> {
    let need = |key: &str| param.ok_or_else(|| Error::MissingParameter(key.to_string()));
    let w = match name {
        CatalogName::ExpHalf => {
            let phi = arc(|x: f64| (0.5 * x.abs()).exp());
            Weight {
                name: "exp_half".into(),
                phi: phi.clone(),
                phi_prime: Some(arc(|x: f64| 0.5 * sgn(x) * (0.5 * x.abs()).exp())),
                v: phi,
                a: 0.5,
                c0: 1.0,
                inf_v: 1.0,
                kernel_v_l1: 4.0,
            }
        }
        CatalogName::ExpA => {
            let a = need("a")?;
            if !(a > 0.0 && a < 1.0) {
                return Err(invalid(
                    "a",
                    format!("exp_a needs 0 < a < 1 so that e^(-|x|)v is integrable, got {a}"),
                ));
            }
            let phi = arc(move |x: f64| (a * x.abs()).exp());
            Weight {
                name: format!("exp_a({a})"),
                phi: phi.clone(),
                phi_prime: Some(arc(move |x: f64| a * sgn(x) * (a * x.abs()).exp())),
                v: phi,
                a,
                c0: 1.0,
                inf_v: 1.0,
                kernel_v_l1: 2.0 / (1.0 - a),
            }
        }
        CatalogName::PolyB => {
            let b = need("b")?;
            if !(b >= 0.0 && b.is_finite()) {
                return Err(invalid("b", format!("poly_b needs b >= 0, got {b}")));
            }
            let phi = arc(move |x: f64| (1.0 + x.abs()).powf(b));
            let v = phi.clone();
            Weight {
                name: format!("poly_b({b})"),
                phi,
                phi_prime: Some(arc(move |x: f64| b * sgn(x) * (1.0 + x.abs()).powf(b - 1.0))),
                kernel_v_l1: kernel_integral(&*v, 0.0, 200.0),
                v,
                a: b,
                c0: 1.0,
                inf_v: 1.0,
            }
        }
        CatalogName::PaperEnvelopeD => {
            let d = need("d")?;
            if !(d > 0.5 && d.is_finite()) {
                return Err(invalid("d", format!("paper_envelope_d needs d > 1/2, got {d}")));
            }
            let e = std::f64::consts::E;
            let phi = arc(move |x: f64| {
                let s = x.abs();
                (0.5 * s).exp() * (1.0 + s).sqrt() * (e + s).ln().powf(d)
            });
            let phi_c = phi.clone();
            let v = phi.clone();
            Weight {
                name: format!("paper_envelope_d({d})"),
                phi,
                phi_prime: Some(arc(move |x: f64| {
                    let s = x.abs();
                    let log_derivative = 0.5 + 0.5 / (1.0 + s) + d / ((e + s) * (e + s).ln());
                    sgn(x) * log_derivative * phi_c(x)
                })),
                kernel_v_l1: kernel_integral(&*v, 0.0, 200.0),
                v,
                a: 1.0 + d / e,
                c0: 1.0,
                inf_v: 1.0,
            }
        }
    };
    Ok(w)
}

/// Parse a catalog reference such as `exp_half`, `exp_a(0.5)`, `poly_b(2)`.
pub fn parse_reference(reference: &str) -> Result<Weight> {
    let reference = reference.trim();
    let (name, param) = match reference.split_once('(') {
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| invalid("weight", format!("malformed reference `{reference}`")))?;
            let value = inner
                .trim()
                .parse::<f64>()
                .map_err(|e| invalid("weight", format!("`{reference}`: {e}")))?;
            (name.trim(), Some(value))
        }
        None => (reference, None),
    };
    catalog(name.parse()?, param)
}

/// `φ_N = min(φ, N)`, same `A` and `v`, moderateness constant `max(c₀, 1/inf v)`.
pub fn truncate(w: &Weight, cap: f64) -> Result<Weight> {
    if !(cap > 0.0 && cap.is_finite()) {
        return Err(invalid("N", format!("truncation level must be positive, got {cap}")));
    }
    let phi = w.phi.clone();
    let base = w.clone();
    Ok(Weight {
        name: format!("{}_min{cap}", w.name),
        phi: arc(move |x| phi(x).min(cap)),
        phi_prime: Some(arc(move |x| if base.phi(x) < cap { base.phi_prime(x) } else { 0.0 })),
        v: w.v.clone(),
        a: w.a,
        c0: w.c0.max(1.0 / w.inf_v),
        inf_v: w.inf_v,
        kernel_v_l1: w.kernel_v_l1,
    })
}

/// A symmetric square lattice `{−E + kE·2/(n−1)}²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub extent: f64,
    pub points: usize,
}

impl Default for Lattice {
    fn default() -> Self {
        Self {
            extent: 40.0,
            points: 201,
        }
    }
}

impl Lattice {
    pub fn coords(&self) -> Vec<f64> {
        let m = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| -self.extent + 2.0 * self.extent * k as f64 / m)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmultiplicativeReport {
    pub ok: bool,
    pub worst_ratio: f64,
    pub witness: Option<[f64; 2]>,
    pub lattice: Lattice,
}

/// Worst `v(x+y)/(v(x)v(y))` over the lattice; non-finite ratios count as
/// violations.
pub fn check_submultiplicative(v: &dyn Fn(f64) -> f64, lattice: Lattice) -> SubmultiplicativeReport {
    let xs = lattice.coords();
    let vs: Vec<f64> = xs.iter().map(|&x| v(x)).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in xs.iter().enumerate() {
            let r = v(x + y) / (vs[i] * vs[j]);
            let r = if r.is_finite() { r } else { f64::INFINITY };
            if r > worst {
                worst = r;
                witness = Some([x, y]);
            }
        }
    }
    SubmultiplicativeReport {
        ok: worst <= 1.0 + SLACK,
        worst_ratio: worst,
        witness: (worst > 1.0 + SLACK).then_some(witness).flatten(),
        lattice,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModerateEstimate {
    pub c0: f64,
    pub witness: [f64; 2],
    /// Estimate on the half-extent lattice; a large jump signals no finite constant.
    pub c0_half_extent: f64,
    pub moderate: bool,
    pub lattice: Lattice,
}

fn moderate_max(phi: &dyn Fn(f64) -> f64, v: &dyn Fn(f64) -> f64, lattice: Lattice) -> (f64, [f64; 2]) {
    let xs = lattice.coords();
    let mut worst = f64::NEG_INFINITY;
    let mut witness = [0.0, 0.0];
    for &x in &xs {
        let vx = v(x);
        for &y in &xs {
            let r = phi(x + y) / (vx * phi(y));
            let r = if r.is_finite() { r } else { f64::INFINITY };
            if r > worst {
                worst = r;
                witness = [x, y];
            }
        }
    }
    (worst, witness)
}

/// Empirical `c₀ = max φ(x+y)/(v(x)φ(y))`. The estimate is repeated on a
/// lattice of half the extent; growth by more than 50% (or a non-finite
/// value) flags the pair as not moderate.
pub fn estimate_moderate_constant(
    phi: &dyn Fn(f64) -> f64,
    v: &dyn Fn(f64) -> f64,
    lattice: Lattice,
) -> ModerateEstimate {
    let (c0, witness) = moderate_max(phi, v, lattice);
    let half = Lattice {
        extent: lattice.extent / 2.0,
        points: lattice.points,
    };
    let (c_half, _) = moderate_max(phi, v, half);
    ModerateEstimate {
        c0,
        witness,
        c0_half_extent: c_half,
        moderate: c0.is_finite() && c0 <= 1.5 * c_half,
        lattice,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    pub witness_x: Option<f64>,
    pub witness_y: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelNorms {
    pub p1: f64,
    pub p2: f64,
    pub pinf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub name: String,
    pub admissible: bool,
    #[serde(rename = "A")]
    pub a: f64,
    pub c0: f64,
    pub c0_estimate: f64,
    pub inf_v: f64,
    pub kernel_v_l1: f64,
    pub kernel_v_norms: KernelNorms,
    pub failures: Vec<Failure>,
}

/// Spacing of the derivative-bound sample.
pub const DERIVATIVE_SAMPLE_STEP: f64 = 1e-3;

/// Sampled checks of the admissibility conditions:
/// (i) `|φ'| ≤ A|φ|` on a `1e-3` grid of `[−40, 40]` (kink at 0 skipped),
/// (ii) `v` sub-multiplicative on the default lattice, together with
/// `φ(x+y) ≤ c₀ v(x) φ(y)`, (iii) `inf v > 0` and at least the declared value,
/// (iv) `∫e^{−|x|}v` finite on `|x| ≤ 40` with a smaller shell `40 ≤ |x| ≤ 80`.
pub fn check_admissible(w: &Weight) -> AdmissibilityReport {
    let mut failures = Vec::new();
    let fail = |check: &str, x: Option<f64>, y: Option<f64>| Failure {
        check: check.into(),
        witness_x: x,
        witness_y: y,
    };

    let steps = (80.0 / DERIVATIVE_SAMPLE_STEP).round() as i64;
    let mut positivity = None;
    let mut derivative = None;
    let mut inf_v = f64::INFINITY;
    for k in 0..=steps {
        let x = -40.0 + k as f64 * DERIVATIVE_SAMPLE_STEP;
        let phi = w.phi(x);
        if positivity.is_none() && !(phi > 0.0 && phi.is_finite()) {
            positivity = Some(x);
        }
        inf_v = inf_v.min(w.v(x));
        if x.abs() < 0.5 * DERIVATIVE_SAMPLE_STEP {
            continue;
        }
        let d = w.phi_prime(x);
        if derivative.is_none() && !(d.abs() <= w.a * phi.abs() * (1.0 + SLACK)) {
            derivative = Some(x);
        }
    }
    if let Some(x) = positivity {
        failures.push(fail("phi positive and finite", Some(x), None));
    }
    if let Some(x) = derivative {
        failures.push(fail("log-derivative bound |phi'| <= A phi", Some(x), None));
    }

    let sub = check_submultiplicative(&*w.v, Lattice::default());
    if !sub.ok {
        let [x, y] = sub.witness.unwrap_or([f64::NAN, f64::NAN]);
        failures.push(fail("v sub-multiplicative", Some(x), Some(y)));
    }
    let moderate = estimate_moderate_constant(&*w.phi, &*w.v, Lattice::default());
    if !(moderate.c0 <= w.c0 * (1.0 + SLACK)) {
        let [x, y] = moderate.witness;
        failures.push(fail("phi v-moderate with declared c0", Some(x), Some(y)));
    }
    if !(inf_v > 0.0 && inf_v >= w.inf_v * (1.0 - SLACK)) {
        failures.push(fail("inf v positive and at least the declared value", None, None));
    }

    let inner = kernel_integral(&*w.v, 0.0, 40.0);
    let shell = kernel_integral(&*w.v, 40.0, 80.0);
    if !(inner.is_finite() && shell.is_finite() && shell < inner) {
        failures.push(fail("e^(-|x|) v integrable (shell 40..80 not smaller)", None, None));
    }

    let dx = 1e-2;
    let samples: Vec<f64> = (0..=16000)
        .map(|k| {
            let x = -80.0 + k as f64 * dx;
            (-x.abs()).exp() * w.v(x)
        })
        .collect();
    let norm = |p: f64| lp_norm_raw(&samples, dx, p).unwrap_or(f64::NAN);
    let kernel_v_norms = KernelNorms {
        p1: inner + shell,
        p2: norm(2.0),
        pinf: norm(f64::INFINITY),
    };
    if !kernel_v_norms.pinf.is_finite() {
        failures.push(fail("e^(-|x|) v bounded", None, None));
    }

    AdmissibilityReport {
        name: w.name.clone(),
        admissible: failures.is_empty(),
        a: w.a,
        c0: w.c0,
        c0_estimate: moderate.c0,
        inf_v: w.inf_v,
        kernel_v_l1: w.kernel_v_l1,
        kernel_v_norms,
        failures,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Periodic discrete convolution `(f ∗ g)_i = dx Σ_j f(x_i − x_j) g_j`, the
/// difference taken on the circle.
pub fn periodic_convolution(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.grid().ensure_same(g.grid())?;
    let n = f.grid().point_count();
    let dx = f.grid().dx();
    let (fv, gv) = (f.values(), g.values());
    let out = (0..n)
        .map(|i| {
            let terms = (0..n).map(|j| fv[(i + n + n / 2 - j) % n] * gv[j]);
            dx * compensated_sum(terms)
        })
        .collect();
    GridFunction::new(*f.grid(), out)
}

/// `‖(f∗g)φ‖_p ≤ c₀‖f v‖₁‖g φ‖_p`, with `1e-6` relative slack.
pub fn young_check(f: &GridFunction, g: &GridFunction, w: &Weight, p: f64) -> Result<YoungReport> {
    let conv = periodic_convolution(f, g)?;
    let grid = f.grid();
    let dx = grid.dx();
    let phi: Vec<f64> = grid.nodes().map(|x| w.phi(x)).collect();
    let v: Vec<f64> = grid.nodes().map(|x| w.v(x)).collect();
    let weighted = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x * y).collect() };
    let lhs = lp_norm_raw(&weighted(conv.values(), &phi), dx, p)?;
    let rhs = w.c0 * lp_norm_raw(&weighted(f.values(), &v), dx, 1.0)? * lp_norm_raw(&weighted(g.values(), &phi), dx, p)?;
    Ok(YoungReport {
        lhs,
        rhs,
        ok: lhs <= rhs * (1.0 + 1e-6),
    })
}
