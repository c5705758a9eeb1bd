//! Nonlinearity pairs `(f, g)`, the named presets, hypothesis validation and
//! the right-hand side `u_t = −f'(u)u_x − ∂xΛ⁻²(g(u) + ½f''(u)u_x²)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::nonlocal::HelmholtzOperator;
use crate::scheme::{Discretization, Scheme};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The pair `(f, g)` with closed-form `f'`, `f''`.
#[derive(Clone)]
pub struct ModelSpec {
    pub name: String,
    pub f: ScalarFn,
    pub f_prime: ScalarFn,
    pub f_second: ScalarFn,
    pub g: ScalarFn,
    /// Known `c` with `g(x) ≤ c x²` for all `x`, when one exists independent of amplitude.
    pub g_quadratic_constant: Option<f64>,
    pub f_prime_vanishes_at_zero: bool,
    pub parameters: BTreeMap<String, f64>,
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpec")
            .field("name", &self.name)
            .field("g_quadratic_constant", &self.g_quadratic_constant)
            .field("f_prime_vanishes_at_zero", &self.f_prime_vanishes_at_zero)
            .field("parameters", &self.parameters)
            .finish()
    }
}

fn arc(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(f)
}

impl ModelSpec {
    /// User-supplied nonlinearities. `f(0) = 0` and `g(0) = 0` are required so
    /// that zero stays a fixed point; the other hypotheses are left to
    /// [`validate_hypotheses`].
    pub fn custom(
        name: impl Into<String>,
        f: ScalarFn,
        f_prime: ScalarFn,
        f_second: ScalarFn,
        g: ScalarFn,
    ) -> Result<Self> {
        let name = name.into();
        if f(0.0) != 0.0 {
            return Err(Error::InvalidParameter {
                name: "f".into(),
                reason: format!("f(0) = {} but must vanish", f(0.0)),
            });
        }
        if g(0.0) != 0.0 {
            return Err(Error::InvalidParameter {
                name: "g".into(),
                reason: format!("g(0) = {} but must vanish", g(0.0)),
            });
        }
        let f_prime_vanishes_at_zero = f_prime(0.0) == 0.0;
        Ok(Self {
            name,
            f,
            f_prime,
            f_second,
            g,
            g_quadratic_constant: None,
            f_prime_vanishes_at_zero,
            parameters: BTreeMap::new(),
        })
    }

    /// `h = g(u) + ½f''(u)u_x²` at one point.
    #[inline]
    pub fn h_point(&self, u: f64, ux: f64) -> f64 {
        (self.g)(u) + 0.5 * (self.f_second)(u) * ux * ux
    }

    /// Largest relative mismatch between the supplied `f'`, `f''` and centred
    /// differences of `f` at 101 points of `[−3, 3]`, with its location.
    pub fn derivative_consistency(&self) -> DerivativeCheck {
        let step1 = 1e-3;
        let step2 = 1e-2;
        let mut worst = DerivativeCheck::default();
        for i in 0..=100 {
            let x = -3.0 + 6.0 * i as f64 / 100.0;
            let f = |s: f64| (self.f)(x + s);
            // Fourth-order centred stencils.
            let d1 = (-f(2.0 * step1) + 8.0 * f(step1) - 8.0 * f(-step1) + f(-2.0 * step1))
                / (12.0 * step1);
            let d2 = (-f(2.0 * step2) + 16.0 * f(step2) - 30.0 * f(0.0) + 16.0 * f(-step2)
                - f(-2.0 * step2))
                / (12.0 * step2 * step2);
            let e1 = (d1 - (self.f_prime)(x)).abs() / (self.f_prime)(x).abs().max(1.0);
            let e2 = (d2 - (self.f_second)(x)).abs() / (self.f_second)(x).abs().max(1.0);
            if e1 > worst.f_prime_error {
                worst.f_prime_error = e1;
                worst.f_prime_witness = x;
            }
            if e2 > worst.f_second_error {
                worst.f_second_error = e2;
                worst.f_second_witness = x;
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DerivativeCheck {
    pub f_prime_error: f64,
    pub f_prime_witness: f64,
    pub f_second_error: f64,
    pub f_second_witness: f64,
}

impl DerivativeCheck {
    pub fn ok(&self, tolerance: f64) -> bool {
        self.f_prime_error <= tolerance && self.f_second_error <= tolerance
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Bbm,
    Dai,
    DghReduced,
    Rch,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Bbm => "bbm",
            Preset::Dai => "dai",
            Preset::DghReduced => "dgh_reduced",
            Preset::Rch => "rch",
        }
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            Preset::Bbm => &[],
            Preset::Dai => &["gamma"],
            Preset::DghReduced => &["Gamma_hat"],
            Preset::Rch => &["beta", "gamma", "Gamma"],
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bbm" => Ok(Preset::Bbm),
            "dai" => Ok(Preset::Dai),
            "dgh_reduced" => Ok(Preset::DghReduced),
            "rch" => Ok(Preset::Rch),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

fn param(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    let v = *params
        .get(key)
        .ok_or_else(|| Error::MissingParameter(key.to_string()))?;
    if !v.is_finite() {
        return Err(Error::InvalidParameter {
            name: key.into(),
            reason: format!("must be finite, got {v}"),
        });
    }
    Ok(v)
}

/// Build one of the named presets. Parameter keys: `dai` → `gamma`;
/// `dgh_reduced` → `Gamma_hat`; `rch` → `beta`, `gamma`, `Gamma`.
pub fn build_preset(name: &str, params: &BTreeMap<String, f64>) -> Result<ModelSpec> {
    let preset: Preset = name.parse()?;
    if let Some(extra) = params
        .keys()
        .find(|k| !preset.parameter_names().contains(&k.as_str()))
    {
        return Err(Error::InvalidParameter {
            name: extra.clone(),
            reason: format!("not a parameter of preset `{}`", preset.as_str()),
        });
    }
    let mut parameters = BTreeMap::new();
    for key in preset.parameter_names() {
        parameters.insert((*key).to_string(), param(params, key)?);
    }
    let spec = match preset {
        Preset::Bbm => ModelSpec {
            name: preset.as_str().into(),
            f: arc(|_| 0.0),
            f_prime: arc(|_| 0.0),
            f_second: arc(|_| 0.0),
            g: arc(|u| 0.5 * u * u),
            g_quadratic_constant: Some(0.5),
            f_prime_vanishes_at_zero: true,
            parameters,
        },
        Preset::Dai => {
            let gamma = parameters["gamma"];
            let c = 0.5 * (3.0 - gamma);
            ModelSpec {
                name: preset.as_str().into(),
                f: arc(move |u| 0.5 * gamma * u * u),
                f_prime: arc(move |u| gamma * u),
                f_second: arc(move |_| gamma),
                g: arc(move |u| c * u * u),
                g_quadratic_constant: (c > 0.0).then_some(c),
                f_prime_vanishes_at_zero: true,
                parameters,
            }
        }
        Preset::DghReduced => {
            let gh = parameters["Gamma_hat"];
            ModelSpec {
                name: preset.as_str().into(),
                f: arc(move |u| u * u + gh * u),
                f_prime: arc(move |u| 2.0 * u + gh),
                f_second: arc(|_| 2.0),
                g: arc(|u| u * u),
                g_quadratic_constant: Some(1.0),
                f_prime_vanishes_at_zero: gh == 0.0,
                parameters,
            }
        }
        Preset::Rch => {
            let (beta, gamma, big_gamma) =
                (parameters["beta"], parameters["gamma"], parameters["Gamma"]);
            ModelSpec {
                name: preset.as_str().into(),
                f: arc(move |u| 0.5 * u * u + big_gamma * u),
                f_prime: arc(move |u| u + big_gamma),
                f_second: arc(|_| 1.0),
                g: arc(move |u| (1.0 + beta / 3.0 * u + gamma / 4.0 * u * u) * u * u),
                // The bound depends on the amplitude; estimated by validation.
                g_quadratic_constant: None,
                f_prime_vanishes_at_zero: big_gamma == 0.0,
                parameters,
            }
        }
    };
    Ok(spec)
}

/// Convenience for parameter maps in code and tests.
pub fn params<const K: usize>(pairs: [(&str, f64); K]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| ((*k).to_string(), *v)).collect()
}

/// Remove the linear advection `α u_x` of the DGH equation by moving to a frame
/// travelling with speed `α`: returns `dgh_reduced` with `Γ̂ = Γ − α`, and `α`.
pub fn galilean_reduce_dgh(alpha: f64, big_gamma: f64) -> Result<(ModelSpec, f64)> {
    let spec = build_preset("dgh_reduced", &params([("Gamma_hat", big_gamma - alpha)]))?;
    Ok((spec, alpha))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// Smoothness is assumed for closed-form nonlinearities, never sampled.
    pub h1_smooth: bool,
    pub h2_ok: bool,
    pub h2_witness: Option<Witness>,
    pub h3_ok: bool,
    pub h3_witness: Option<Witness>,
    pub quadratic_bound_ok: bool,
    pub c_estimate: Option<f64>,
    pub f_prime_zero_ok: bool,
    pub f_prime_at_zero: f64,
    pub amplitude_range: [f64; 2],
}

impl HypothesisReport {
    /// H2, H3 and the quadratic bound all hold.
    pub fn core_ok(&self) -> bool {
        self.h1_smooth && self.h2_ok && self.h3_ok && self.quadratic_bound_ok
    }

    /// Additionally `f'(0) = 0`, as required by the tail and persistence results.
    pub fn all_ok(&self) -> bool {
        self.core_ok() && self.f_prime_zero_ok
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.h2_ok {
            out.push(match self.h2_witness {
                Some(w) => format!("H2 fails at x = {} (value {})", w.x, w.value),
                None => "H2 fails".into(),
            });
        }
        if !self.h3_ok {
            out.push(match self.h3_witness {
                Some(w) => format!("H3 fails at x = {} (g = {})", w.x, w.value),
                None => "H3 fails".into(),
            });
        }
        if !self.quadratic_bound_ok {
            out.push(format!(
                "quadratic bound g(x) <= c x^2 fails (c estimate {:?})",
                self.c_estimate
            ));
        }
        if !self.f_prime_zero_ok {
            out.push(format!("f'(0) = {} is nonzero", self.f_prime_at_zero));
        }
        out
    }
}

/// Number of uniform sample points on `[−M₀, M₀]`.
pub const HYPOTHESIS_SAMPLES: usize = 2049;

/// Sample `f''` and `g` on `[−M₀, M₀]` and report H2, H3, the quadratic bound
/// `g(x) ≤ c x²` (with `c = max g(x)/x²`) and `f'(0) = 0`.
pub fn validate_hypotheses(spec: &ModelSpec, amplitude: f64) -> Result<HypothesisReport> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::InvalidParameter {
            name: "amplitude".into(),
            reason: format!("must be positive, got {amplitude}"),
        });
    }
    let m = HYPOTHESIS_SAMPLES - 1;
    let xs = (0..=m).map(|i| -amplitude + 2.0 * amplitude * i as f64 / m as f64);

    let f0 = (spec.f)(0.0);
    let mut h2_witness = (f0 != 0.0).then_some(Witness { x: 0.0, value: f0 });
    let g0 = (spec.g)(0.0);
    let mut h3_witness = (g0 != 0.0).then_some(Witness { x: 0.0, value: g0 });
    let mut c_max = f64::NEG_INFINITY;
    for x in xs {
        let fpp = (spec.f_second)(x);
        if h2_witness.is_none() && !(fpp >= 0.0) {
            h2_witness = Some(Witness { x, value: fpp });
        }
        if x.abs() < 1e-12 {
            continue;
        }
        let g = (spec.g)(x);
        if h3_witness.is_none() && !(g > 0.0) {
            h3_witness = Some(Witness { x, value: g });
        }
        c_max = c_max.max(g / (x * x));
    }
    // g/x² stays bounded near 0 only if g'(0) = 0; the sampled lattice cannot see that.
    let step = 1e-4;
    let g_prime0 = ((spec.g)(step) - (spec.g)(-step)) / (2.0 * step);
    let c_estimate = c_max.is_finite().then_some(c_max);
    let quadratic_bound_ok = c_max.is_finite() && c_max > 0.0 && g_prime0.abs() <= 1e-8;
    let fp0 = (spec.f_prime)(0.0);
    Ok(HypothesisReport {
        h1_smooth: true,
        h2_ok: h2_witness.is_none(),
        h2_witness,
        h3_ok: h3_witness.is_none(),
        h3_witness,
        quadratic_bound_ok,
        c_estimate,
        f_prime_zero_ok: fp0.abs() <= 1e-14,
        f_prime_at_zero: fp0,
        amplitude_range: [-amplitude, amplitude],
    })
}

/// `du/dt` through the dealiased Fourier pipeline.
pub fn rhs(spec: &ModelSpec, op: &HelmholtzOperator, u: &GridFunction) -> Result<GridFunction> {
    let disc = Discretization::with_operator(op.clone(), Scheme::Spectral);
    disc.rhs(spec, u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_closed_forms() {
        let dai = build_preset("dai", &params([("gamma", 1.0)])).unwrap();
        for u in [-1.5, 0.0, 0.3, 2.0] {
            assert_eq!((dai.f)(u), u * u / 2.0);
            assert_eq!((dai.g)(u), u * u);
        }
        let bbm = build_preset("bbm", &BTreeMap::new()).unwrap();
        assert_eq!((bbm.f)(3.0), 0.0);
        assert_eq!((bbm.g)(3.0), 4.5);
        let rch = build_preset("rch", &params([("beta", 1.0), ("gamma", 1.0), ("Gamma", 0.0)])).unwrap();
        let u = 0.7;
        assert!(((rch.g)(u) - (1.0 + u / 3.0 + u * u / 4.0) * u * u).abs() < 1e-15);
        assert!(rch.f_prime_vanishes_at_zero);
    }

    #[test]
    fn preset_errors() {
        assert!(matches!(
            build_preset("dai", &BTreeMap::new()),
            Err(Error::MissingParameter(k)) if k == "gamma"
        ));
        assert!(matches!(
            build_preset("kdv", &BTreeMap::new()),
            Err(Error::UnknownPreset(_))
        ));
        assert!(build_preset("bbm", &params([("gamma", 1.0)])).is_err());
    }

    #[test]
    fn hypothesis_examples() {
        let dai = build_preset("dai", &params([("gamma", 3.5)])).unwrap();
        let r = validate_hypotheses(&dai, 1.0).unwrap();
        assert!(!r.h3_ok);
        let w = r.h3_witness.unwrap();
        assert!(w.x != 0.0 && w.value < 0.0);
        assert!((w.value + 0.25 * w.x * w.x).abs() < 1e-15);

        let rch = build_preset("rch", &params([("beta", 4.0), ("gamma", 1.0), ("Gamma", 0.0)])).unwrap();
        let r = validate_hypotheses(&rch, 5.0).unwrap();
        assert!(!r.h3_ok);

        let dai2 = build_preset("dai", &params([("gamma", 2.0)])).unwrap();
        let r = validate_hypotheses(&dai2, 1.0).unwrap();
        assert!(r.all_ok(), "{:?}", r.failures());
        assert!((r.c_estimate.unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dai_three_has_no_positive_g() {
        let dai = build_preset("dai", &params([("gamma", 3.0)])).unwrap();
        let r = validate_hypotheses(&dai, 1.0).unwrap();
        assert!(!r.h3_ok);
        assert!(!r.quadratic_bound_ok);
        assert!(r.h2_ok);
    }

    #[test]
    fn mirrored_g_fails_bound_and_h3() {
        let spec = ModelSpec::custom(
            "mirrored",
            arc(|_| 0.0),
            arc(|_| 0.0),
            arc(|_| 0.0),
            arc(|u: f64| -u * u),
        )
        .unwrap();
        let r = validate_hypotheses(&spec, 1.0).unwrap();
        assert!(!r.h3_ok && !r.quadratic_bound_ok);
        assert_eq!(r.c_estimate, Some(-1.0));
        assert!(validate_hypotheses(&spec, 0.0).is_err());
    }

    #[test]
    fn galilean_examples() {
        let (s, a) = galilean_reduce_dgh(0.0, 0.0).unwrap();
        assert_eq!(a, 0.0);
        assert_eq!((s.f)(1.5), 2.25);
        assert_eq!((s.g)(1.5), 2.25);
        let (s, a) = galilean_reduce_dgh(1.0, 1.0).unwrap();
        assert_eq!((a, s.parameters["Gamma_hat"]), (1.0, 0.0));
        let (s, _) = galilean_reduce_dgh(2.0, 5.0).unwrap();
        assert_eq!(s.parameters["Gamma_hat"], 3.0);
        assert_eq!((s.f)(1.0), 4.0);
        assert!(!s.f_prime_vanishes_at_zero);
    }

    #[test]
    fn derivatives_consistent_for_presets() {
        for (name, p) in [
            ("bbm", BTreeMap::new()),
            ("dai", params([("gamma", 1.7)])),
            ("dgh_reduced", params([("Gamma_hat", 0.4)])),
            ("rch", params([("beta", 1.0), ("gamma", 1.0), ("Gamma", 0.2)])),
        ] {
            let spec = build_preset(name, &p).unwrap();
            let check = spec.derivative_consistency();
            assert!(check.ok(1e-6), "{name}: {check:?}");
        }
    }
}
