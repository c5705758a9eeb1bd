//! Initial data: Gaussians, compactly supported bumps, the envelope class
//! `e^{−|x|/2}(1+|x|)^{−1/2}(ln(e+|x|))^{−d'}` and CSV input.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatumKind {
    Gaussian,
    Bump,
    EnvelopeClass,
    CustomCsv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Datum {
    /// `a·e^{−((x−x₀)/w)²}`.
    Gaussian { a: f64, w: f64, x0: f64 },
    /// `a·e^{−1/(1−(x/ρ)²)}` on `|x| < ρ`, zero outside.
    Bump { a: f64, rho: f64 },
    /// `a·e^{−r/2}(1+r)^{−1/2}(ln(e+r))^{−d'}` with `r` a smooth version of `|x|`.
    EnvelopeClass { a: f64, d_prime: f64 },
    CustomCsv { path: PathBuf },
}

fn take(
    params: &BTreeMap<String, f64>,
    allowed: &[(&str, f64)],
    kind: &str,
) -> Result<Vec<f64>> {
    if let Some(k) = params.keys().find(|k| !allowed.iter().any(|(a, _)| a == k)) {
        return Err(Error::InvalidParameter {
            name: k.clone(),
            reason: format!("not a parameter of the {kind} datum"),
        });
    }
    Ok(allowed
        .iter()
        .map(|(k, default)| params.get(*k).copied().unwrap_or(*default))
        .collect())
}

fn check(name: &str, ok: bool, reason: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: name.into(),
            reason: reason(),
        })
    }
}

impl Datum {
    /// Build from a kind and a parameter map; omitted parameters take the
    /// defaults `a = 1, w = 1, x0 = 0, rho = 1, d_prime = 1`.
    pub fn from_params(kind: DatumKind, params: &BTreeMap<String, f64>, path: Option<&Path>) -> Result<Self> {
        let datum = match kind {
            DatumKind::Gaussian => {
                let v = take(params, &[("a", 1.0), ("w", 1.0), ("x0", 0.0)], "gaussian")?;
                Datum::Gaussian { a: v[0], w: v[1], x0: v[2] }
            }
            DatumKind::Bump => {
                let v = take(params, &[("a", 1.0), ("rho", 1.0)], "bump")?;
                Datum::Bump { a: v[0], rho: v[1] }
            }
            DatumKind::EnvelopeClass => {
                let v = take(params, &[("a", 1.0), ("d_prime", 1.0)], "envelope_class")?;
                Datum::EnvelopeClass { a: v[0], d_prime: v[1] }
            }
            DatumKind::CustomCsv => {
                take(params, &[], "custom_csv")?;
                let path = path.ok_or_else(|| Error::MissingParameter("path".into()))?;
                Datum::CustomCsv { path: path.to_path_buf() }
            }
        };
        datum.validate()?;
        Ok(datum)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Datum::Gaussian { a, w, x0 } => {
                check("a", a.is_finite(), || format!("amplitude must be finite, got {a}"))?;
                check("x0", x0.is_finite(), || format!("centre must be finite, got {x0}"))?;
                check("w", w > 0.0 && w.is_finite(), || format!("width must be positive, got {w}"))
            }
            Datum::Bump { a, rho } => {
                check("a", a.is_finite(), || format!("amplitude must be finite, got {a}"))?;
                check("rho", rho > 0.0 && rho.is_finite(), || format!("radius must be positive, got {rho}"))
            }
            Datum::EnvelopeClass { a, d_prime } => {
                check("a", a.is_finite(), || format!("amplitude must be finite, got {a}"))?;
                check("d_prime", d_prime > 0.5 && d_prime.is_finite(), || {
                    format!("d' must exceed 1/2, got {d_prime}")
                })
            }
            Datum::CustomCsv { .. } => Ok(()),
        }
    }

    pub fn kind(&self) -> DatumKind {
        match self {
            Datum::Gaussian { .. } => DatumKind::Gaussian,
            Datum::Bump { .. } => DatumKind::Bump,
            Datum::EnvelopeClass { .. } => DatumKind::EnvelopeClass,
            Datum::CustomCsv { .. } => DatumKind::CustomCsv,
        }
    }

    /// Point value of the closed-form kinds; `None` for CSV input.
    pub fn value(&self, x: f64) -> Option<f64> {
        match *self {
            Datum::Gaussian { a, w, x0 } => {
                let s = (x - x0) / w;
                Some(a * (-s * s).exp())
            }
            Datum::Bump { a, rho } => {
                let s = x / rho;
                Some(if s.abs() < 1.0 { a * (-1.0 / (1.0 - s * s)).exp() } else { 0.0 })
            }
            Datum::EnvelopeClass { a, d_prime } => {
                let r = smooth_abs(x);
                Some(a * (-0.5 * r).exp() / (1.0 + r).sqrt() / (std::f64::consts::E + r).ln().powf(d_prime))
            }
            Datum::CustomCsv { .. } => None,
        }
    }

    /// Sample on a grid. A bump wider than half the box is rejected because
    /// it leaves no room for the tail windows.
    pub fn sample(&self, grid: &Grid) -> Result<GridFunction> {
        self.validate()?;
        match self {
            Datum::Bump { rho, .. } if *rho >= grid.half_length() / 2.0 => Err(Error::InvalidParameter {
                name: "rho".into(),
                reason: format!("bump radius {rho} must be below L/2 = {}", grid.half_length() / 2.0),
            }),
            Datum::CustomCsv { path } => {
                let file = std::fs::File::open(path)?;
                GridFunction::read_csv(*grid, file)
            }
            _ => GridFunction::from_fn(*grid, |x| self.value(x).unwrap_or(0.0)),
        }
    }
}

pub fn make_datum(kind: DatumKind, params: &BTreeMap<String, f64>, grid: &Grid) -> Result<GridFunction> {
    Datum::from_params(kind, params, None)?.sample(grid)
}

/// `C^∞` step: 0 on `s ≤ ½`, 1 on `s ≥ 1`.
fn smooth_step(s: f64) -> f64 {
    let bump = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let t = 2.0 * s - 1.0;
    let (p, q) = (bump(t), bump(1.0 - t));
    if p + q == 0.0 {
        0.0
    } else {
        p / (p + q)
    }
}

/// Smooth replacement for `|x|`: equal to `(x²+1)/2` on `|x| ≤ ½` and to `|x|`
/// on `|x| ≥ 1`, blended by [`smooth_step`] in between.
pub fn smooth_abs(x: f64) -> f64 {
    let s = x.abs();
    let psi = smooth_step(s);
    psi * s + (1.0 - psi) * 0.5 * (x * x + 1.0)
}
