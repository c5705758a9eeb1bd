//! Scenario verdicts as pure functions of emitted metrics.
//!
//! [`compute_metrics`] reduces a saved series (plus the weights report for
//! `weights_suite`) to a flat metric map; [`judge`] applies the thresholds.
//! `rodwave verdict` re-runs both on the files of a finished run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::Scenario;
use crate::output::{SeriesRow, WeightsReport};

pub const DRIFT_TOL: f64 = 1e-7;
pub const PROFILE_TOL: f64 = 1e-6;
pub const TAIL_FIT_TOL: f64 = 0.02;
/// `u(t, x_probe)` must exceed this many `eps·‖u(t)‖∞`.
pub const TAIL_FLOOR_FACTOR: f64 = 1e3;
/// Tail probing starts at this time.
pub const TAIL_PROBE_FROM: f64 = 0.1;
pub const ENVELOPE_GROWTH: f64 = 3.0;

pub type Metrics = BTreeMap<String, f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub scenario: Scenario,
    pub pass: bool,
    pub exit_code: i32,
    #[serde(with = "crate::real::map")]
    pub metrics: Metrics,
    /// Machine-readable reason when `pass` is false (or the pass is trivial).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Verdict {
    pub fn rejected(scenario: Scenario, exit_code: i32, reason: String) -> Self {
        Self {
            scenario,
            pass: false,
            exit_code,
            metrics: Metrics::new(),
            reason: Some(reason),
        }
    }
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |m: f64, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

/// Reduce the series of a run to the metrics its scenario is judged on.
pub fn compute_metrics(scenario: Scenario, series: &[SeriesRow], weights: Option<&WeightsReport>) -> Metrics {
    let mut m = Metrics::new();
    if let Some(first) = series.first() {
        m.insert("datum_sup".into(), first.max_u);
        m.insert("final_t".into(), series.last().map_or(0.0, |r| r.t));
        m.insert("max_ux".into(), max_of(series.iter().map(|r| r.max_ux)));
    }
    match scenario {
        Scenario::Conservation => {
            let h0 = series.first().map_or(0.0, |r| r.energy);
            let drift = if h0 == 0.0 {
                max_of(series.iter().map(|r| r.energy.abs()))
            } else {
                max_of(series.iter().map(|r| ((r.energy - h0) / h0).abs()))
            };
            m.insert("energy_drift".into(), drift);
        }
        Scenario::Profile => {
            let later: Vec<_> = series.iter().filter(|r| r.t > 0.0).collect();
            let missing = later.iter().filter(|r| r.profile_residual.is_none()).count();
            m.insert("profile_unavailable".into(), missing as f64);
            m.insert(
                "max_profile_residual".into(),
                max_of(later.iter().filter_map(|r| r.profile_residual)),
            );
        }
        Scenario::CompactSupport => {
            let later: Vec<_> = series.iter().filter(|r| r.t > 0.0).collect();
            let missing = later.iter().filter(|r| r.tail_relative_error.is_none()).count();
            m.insert("tail_fit_unavailable".into(), missing as f64);
            m.insert(
                "max_tail_relative_error".into(),
                max_of(later.iter().filter_map(|r| r.tail_relative_error)),
            );
            let margins: Vec<f64> = series
                .iter()
                .filter(|r| r.t >= TAIL_PROBE_FROM - 1e-12)
                .map(|r| {
                    let floor = TAIL_FLOOR_FACTOR * f64::EPSILON * r.max_u;
                    match r.u_probe {
                        Some(u) if floor > 0.0 => u / floor,
                        Some(u) if u != 0.0 => f64::INFINITY,
                        _ => 0.0,
                    }
                })
                .collect();
            let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
            m.insert("min_tail_margin".into(), if margins.is_empty() { 0.0 } else { min_margin });
        }
        Scenario::DecayPersistence => {
            let s0 = series.first().and_then(|r| r.envelope_sup).unwrap_or(0.0);
            let growth = if s0 == 0.0 {
                max_of(series.iter().map(|r| r.envelope_sup.unwrap_or(f64::NAN)))
            } else {
                max_of(series.iter().map(|r| r.envelope_sup.unwrap_or(f64::NAN) / s0))
            };
            m.insert("envelope_sup_t0".into(), s0);
            m.insert("envelope_growth".into(), growth);
        }
        Scenario::WeightedPersistence => {
            if let Some(first) = series.first() {
                for (label, n0) in first.weighted_norm.iter().flatten() {
                    let kappa = series
                        .iter()
                        .map(|r| {
                            let n = r.weighted_norm.as_ref().and_then(|w| w.get(label)).copied().unwrap_or(f64::NAN);
                            if *n0 == 0.0 {
                                1.0
                            } else {
                                n / n0
                            }
                        })
                        .fold(1.0, |k: f64, r| if r.is_nan() || k.is_nan() { f64::NAN } else { k.max(r) });
                    m.insert(format!("kappa_hat[{label}]"), kappa);
                }
            }
        }
        Scenario::WeightsSuite => {
            if let Some(w) = weights {
                m.insert("weights".into(), w.admissibility.len() as f64);
                m.insert(
                    "inadmissible".into(),
                    w.admissibility.iter().filter(|r| !r.admissible).count() as f64,
                );
                m.insert("truncation_failures".into(), w.truncation_failures.len() as f64);
                m.insert("young_worst_ratio".into(), w.young_worst_ratio);
                m.insert("young_failures".into(), w.young_failures as f64);
                m.insert("kernel_norm_error".into(), w.kernel_norm_error);
            }
        }
    }
    m
}

fn get(m: &Metrics, key: &str) -> f64 {
    m.get(key).copied().unwrap_or(f64::NAN)
}

/// Pass/fail for a scenario from its metrics alone.
pub fn judge(scenario: Scenario, metrics: &Metrics) -> Verdict {
    let fail = |reason: String| Verdict {
        scenario,
        pass: false,
        exit_code: 1,
        metrics: metrics.clone(),
        reason: Some(reason),
    };
    let pass = |reason: Option<String>| Verdict {
        scenario,
        pass: true,
        exit_code: 0,
        metrics: metrics.clone(),
        reason,
    };
    if scenario != Scenario::WeightsSuite && metrics.get("datum_sup") == Some(&0.0) {
        return pass(Some("zero datum: trivial pass".into()));
    }
    match scenario {
        Scenario::Conservation => {
            let drift = get(metrics, "energy_drift");
            if drift <= DRIFT_TOL {
                pass(None)
            } else {
                fail(format!("energy_drift {drift:e} exceeds {DRIFT_TOL:e}"))
            }
        }
        Scenario::Profile => {
            let missing = get(metrics, "profile_unavailable");
            let r = get(metrics, "max_profile_residual");
            if missing != 0.0 {
                fail(format!("profile decomposition unavailable at {missing} checkpoints"))
            } else if r <= PROFILE_TOL {
                pass(None)
            } else {
                fail(format!("max_profile_residual {r:e} exceeds {PROFILE_TOL:e}"))
            }
        }
        Scenario::CompactSupport => {
            let missing = get(metrics, "tail_fit_unavailable");
            let e = get(metrics, "max_tail_relative_error");
            let margin = get(metrics, "min_tail_margin");
            if missing != 0.0 {
                fail(format!("tail fit unavailable at {missing} checkpoints"))
            } else if !(e <= TAIL_FIT_TOL) {
                fail(format!("max_tail_relative_error {e:e} exceeds {TAIL_FIT_TOL}"))
            } else if !(margin > 1.0) {
                fail(format!("tail probe below the noise floor (margin {margin:e})"))
            } else {
                pass(None)
            }
        }
        Scenario::DecayPersistence => {
            let g = get(metrics, "envelope_growth");
            if g.is_finite() && g <= ENVELOPE_GROWTH {
                pass(None)
            } else {
                fail(format!("envelope_growth {g} exceeds {ENVELOPE_GROWTH}"))
            }
        }
        Scenario::WeightedPersistence => {
            let bad: Vec<&String> = metrics
                .iter()
                .filter(|(k, v)| k.starts_with("kappa_hat[") && !v.is_finite())
                .map(|(k, _)| k)
                .collect();
            if !metrics.keys().any(|k| k.starts_with("kappa_hat[")) {
                fail("no weighted norms recorded".into())
            } else if bad.is_empty() {
                pass(None)
            } else {
                fail(format!("non-finite growth factors: {bad:?}"))
            }
        }
        Scenario::WeightsSuite => {
            let count = |k: &str| get(metrics, k);
            if count("weights").is_nan() {
                fail("no weights report".into())
            } else if count("inadmissible") != 0.0 {
                fail(format!("{} weights not admissible", count("inadmissible")))
            } else if count("truncation_failures") != 0.0 {
                fail(format!("{} truncation checks failed", count("truncation_failures")))
            } else if count("young_failures") != 0.0 {
                fail(format!("{} weighted Young checks failed", count("young_failures")))
            } else {
                pass(None)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64, energy: f64) -> SeriesRow {
        SeriesRow {
            t,
            energy,
            max_u: 1.0,
            max_ux: 1.0,
            lambda_plus: None,
            lambda_minus: None,
            envelope_sup: Some(1.0 + t),
            weighted_norm: None,
            boundary_tail: 0.0,
            profile_residual: None,
            tail_relative_error: None,
            u_probe: None,
        }
    }

    #[test]
    fn conservation_threshold() {
        let ok = [row(0.0, 1.0), row(1.0, 1.0 + 5e-8)];
        let v = judge(Scenario::Conservation, &compute_metrics(Scenario::Conservation, &ok, None));
        assert!(v.pass && v.exit_code == 0);
        let bad = [row(0.0, 1.0), row(1.0, 1.0 + 2e-7)];
        let v = judge(Scenario::Conservation, &compute_metrics(Scenario::Conservation, &bad, None));
        assert!(!v.pass && v.exit_code == 1 && v.reason.is_some());
    }

    #[test]
    fn decay_growth_threshold() {
        let rows = [row(0.0, 1.0), row(1.0, 1.0), row(2.0, 1.0)];
        assert!(judge(Scenario::DecayPersistence, &compute_metrics(Scenario::DecayPersistence, &rows, None)).pass);
        let rows = [row(0.0, 1.0), row(2.5, 1.0)];
        assert!(!judge(Scenario::DecayPersistence, &compute_metrics(Scenario::DecayPersistence, &rows, None)).pass);
    }

    #[test]
    fn missing_profile_fails() {
        let rows = [row(0.0, 1.0), row(1.0, 1.0)];
        let v = judge(Scenario::Profile, &compute_metrics(Scenario::Profile, &rows, None));
        assert!(!v.pass);
    }

    #[test]
    fn zero_datum_passes_trivially() {
        let mut r = row(0.0, 0.0);
        r.max_u = 0.0;
        for s in [Scenario::Conservation, Scenario::Profile, Scenario::CompactSupport, Scenario::DecayPersistence] {
            let v = judge(s, &compute_metrics(s, &[r.clone(), r.clone()], None));
            assert!(v.pass, "{s}");
        }
    }

    #[test]
    fn judge_is_pure() {
        let rows = [row(0.0, 1.0), row(1.0, 1.0 + 1e-9)];
        let m = compute_metrics(Scenario::Conservation, &rows, None);
        assert_eq!(judge(Scenario::Conservation, &m), judge(Scenario::Conservation, &m));
    }
}
