//! Classical RK4 time stepping with checkpoints and running time integrals of
//! `h_τ` and `f'(u)u_x`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::diagnostics::energy;
use crate::error::{Error, Result};
use crate::grid::{check_finite, Grid, GridFunction};
use crate::model::ModelSpec;
use crate::nonlocal::HelmholtzOperator;
use crate::scheme::{Discretization, Parts, Scheme};

/// Slope beyond which a run is treated as breaking.
pub const BLOWUP_SLOPE: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub dt: f64,
    pub t_final: f64,
    pub checkpoint_times: Vec<f64>,
    pub cfl_safety: f64,
    pub tail_guard_threshold: f64,
    pub scheme: Scheme,
}

impl EvolveOptions {
    pub fn new(dt: f64, t_final: f64, checkpoint_times: Vec<f64>) -> Self {
        Self {
            dt,
            t_final,
            checkpoint_times,
            cfl_safety: 0.5,
            tail_guard_threshold: 1e-12,
            scheme: Scheme::default(),
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    fn invalid(name: &str, reason: String) -> Error {
        Error::InvalidParameter {
            name: name.into(),
            reason,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Self::invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Self::invalid(
                "T_final",
                format!("must be positive, got {}", self.t_final),
            ));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Self::invalid(
                "cfl_safety",
                format!("must lie in (0, 1], got {}", self.cfl_safety),
            ));
        }
        for w in self.checkpoint_times.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Self::invalid(
                    "checkpoints",
                    "must be strictly increasing".into(),
                ));
            }
        }
        if let Some(t) = self
            .checkpoint_times
            .iter()
            .find(|&&t| !(0.0..=self.t_final).contains(&t))
        {
            return Err(Self::invalid(
                "checkpoints",
                format!("{t} lies outside [0, {}]", self.t_final),
            ));
        }
        Ok(())
    }

    /// Number of steps and the step actually taken (`T/n ≤ dt`).
    pub fn step_plan(&self) -> (usize, f64) {
        let n = ((self.t_final / self.dt) - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

/// State recorded at a checkpoint.
#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub t: f64,
    pub step: usize,
    pub u: GridFunction,
    pub ux: GridFunction,
    /// `∫₀ᵗ h_τ dτ` with `h` formed at the nodes (trapezoid in time).
    pub h_accumulator: GridFunction,
    /// `∫₀ᵗ f'(u)u_x dτ` (trapezoid in time).
    pub r_accumulator: GridFunction,
    pub energy: f64,
    pub boundary_tail: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub spec: ModelSpec,
    pub grid: Grid,
    pub scheme: Scheme,
    pub dt: f64,
    pub checkpoints: Vec<Checkpoint>,
    /// Time at which the slope guard fired, if it did.
    pub truncated: Option<f64>,
}

/// Serialized per-checkpoint record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub t: f64,
    pub energy: f64,
    pub max_u: f64,
    pub max_ux: f64,
    pub boundary_tail: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.checkpoints.iter().map(|c| c.t).collect()
    }

    pub fn checkpoint(&self, t: f64) -> Result<&Checkpoint> {
        self.checkpoints
            .iter()
            .find(|c| (c.t - t).abs() <= 1e-9 * t.abs().max(1.0))
            .ok_or(Error::NotCheckpointed(t))
    }

    pub fn initial(&self) -> &Checkpoint {
        &self.checkpoints[0]
    }

    pub fn last(&self) -> &Checkpoint {
        self.checkpoints.last().expect("trajectory has a t = 0 checkpoint")
    }

    pub fn energy_series(&self) -> Vec<(f64, f64)> {
        self.checkpoints.iter().map(|c| (c.t, c.energy)).collect()
    }

    pub fn records(&self) -> Vec<CheckpointRecord> {
        self.checkpoints
            .iter()
            .map(|c| CheckpointRecord {
                t: c.t,
                energy: c.energy,
                max_u: c.u.max_abs(),
                max_ux: c.ux.max_abs(),
                boundary_tail: c.boundary_tail,
            })
            .collect()
    }

    /// One JSON object per checkpoint.
    pub fn write_ndjson<W: Write>(&self, mut writer: W) -> Result<()> {
        for record in self.records() {
            let line = serde_json::to_string(&record).map_err(std::io::Error::other)?;
            writeln!(writer, "{line}")?;
        }
        Ok(())
    }
}

/// File-name tag for a checkpoint time.
pub fn snapshot_tag(t: f64) -> String {
    format!("{t:.6}")
}

/// One classical RK4 step through the dealiased Fourier pipeline.
pub fn step_rk4(
    spec: &ModelSpec,
    op: &HelmholtzOperator,
    u: &GridFunction,
    dt: f64,
) -> Result<GridFunction> {
    let disc = Discretization::with_operator(op.clone(), Scheme::Spectral);
    step_rk4_with(&disc, spec, u, dt)
}

/// One classical RK4 step with the given discretisation.
pub fn step_rk4_with(
    disc: &Discretization,
    spec: &ModelSpec,
    u: &GridFunction,
    dt: f64,
) -> Result<GridFunction> {
    disc.grid().ensure_same(u.grid())?;
    let k1 = disc.parts(spec, u.values()).rhs();
    let next = rk4_from_k1(disc, spec, u.values(), &k1, dt);
    check_finite(&next, "rk4 step").map_err(|_| Error::NumericalAbort {
        step: 1,
        t: dt,
        field: "u".into(),
    })?;
    GridFunction::new(*disc.grid(), next)
}

fn rk4_from_k1(disc: &Discretization, spec: &ModelSpec, u: &[f64], k1: &[f64], dt: f64) -> Vec<f64> {
    let axpy = |k: &[f64], a: f64| -> Vec<f64> { u.iter().zip(k).map(|(u, k)| u + a * k).collect() };
    let k2 = disc.parts(spec, &axpy(k1, 0.5 * dt)).rhs();
    let k3 = disc.parts(spec, &axpy(&k2, 0.5 * dt)).rhs();
    let k4 = disc.parts(spec, &axpy(&k3, dt)).rhs();
    (0..u.len())
        .map(|j| u[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Integrate from `u0` to `opts.t_final`, recording the requested checkpoints
/// (plus `t = 0` and `t = T_final`).
///
/// Hypotheses are not checked here; callers decide whether to gate on them.
pub fn evolve(spec: &ModelSpec, u0: &GridFunction, opts: &EvolveOptions) -> Result<Trajectory> {
    let disc = Discretization::new(*u0.grid(), opts.scheme);
    evolve_with(&disc, spec, u0, opts)
}

pub fn evolve_with(
    disc: &Discretization,
    spec: &ModelSpec,
    u0: &GridFunction,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    let grid = *u0.grid();
    disc.grid().ensure_same(&grid)?;
    let (n_steps, dt) = opts.step_plan();

    let mut targets: Vec<(usize, f64)> = Vec::new();
    let mut requested = opts.checkpoint_times.clone();
    requested.push(0.0);
    requested.push(opts.t_final);
    requested.sort_by(f64::total_cmp);
    requested.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    for t in requested {
        let step = (t / dt).round() as usize;
        if (step as f64 * dt - t).abs() > 1e-9 * opts.t_final.max(1.0) {
            return Err(Error::InvalidParameter {
                name: "checkpoints".into(),
                reason: format!("t = {t} is not a multiple of the step {dt}"),
            });
        }
        if targets.last().map(|&(s, _)| s) != Some(step) {
            targets.push((step, t));
        }
    }

    let n = grid.point_count();
    let dx = grid.dx();
    let mut u = u0.values().to_vec();
    let mut parts = disc.parts(spec, &u);
    let mut h_now = parts.nodal_h(spec, &u);
    let mut h_acc = vec![0.0; n];
    let mut r_acc = vec![0.0; n];
    let mut checkpoints = Vec::with_capacity(targets.len());
    let mut next_target = 0;
    let mut truncated = None;

    let record = |step: usize, t: f64, u: &[f64], parts: &Parts, h_acc: &[f64], r_acc: &[f64]| -> Result<Checkpoint> {
        let uf = GridFunction::new(grid, u.to_vec())?;
        let boundary_tail = uf.boundary_tail();
        if boundary_tail > opts.tail_guard_threshold {
            log::warn!(
                "t = {t}: |u(±L)|/max|u| = {boundary_tail:.3e} exceeds {:.1e}; periodisation may matter",
                opts.tail_guard_threshold
            );
        }
        Ok(Checkpoint {
            t,
            step,
            energy: energy(&uf),
            ux: GridFunction::new(grid, parts.ux.clone())?,
            h_accumulator: GridFunction::new(grid, h_acc.to_vec())?,
            r_accumulator: GridFunction::new(grid, r_acc.to_vec())?,
            u: uf,
            boundary_tail,
        })
    };

    for step in 0..=n_steps {
        let t = step as f64 * dt;
        if let Some(field) = parts.first_non_finite() {
            return Err(Error::NumericalAbort {
                step,
                t,
                field: field.into(),
            });
        }
        if next_target < targets.len() && targets[next_target].0 == step {
            let tc = targets[next_target].1;
            checkpoints.push(record(step, tc, &u, &parts, &h_acc, &r_acc)?);
            next_target += 1;
        }
        if step == n_steps {
            break;
        }
        if max_abs(&parts.ux) > BLOWUP_SLOPE {
            log::warn!("slope guard fired at t = {t}");
            truncated = Some(t);
            break;
        }
        let speed = u.iter().fold(1.0f64, |m, &v| m.max((spec.f_prime)(v).abs()));
        let limit = opts.cfl_safety * dx / speed;
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::Cfl { step, dt, limit });
        }

        let k1 = parts.rhs();
        let next = rk4_from_k1(disc, spec, &u, &k1, dt);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalAbort {
                step: step + 1,
                t: t + dt,
                field: "u".into(),
            });
        }
        let next_parts = disc.parts(spec, &next);
        let h_next = next_parts.nodal_h(spec, &next);
        for j in 0..n {
            h_acc[j] += 0.5 * dt * (h_now[j] + h_next[j]);
            r_acc[j] += 0.5 * dt * (parts.transport[j] + next_parts.transport[j]);
        }
        u = next;
        parts = next_parts;
        h_now = h_next;
    }

    Ok(Trajectory {
        spec: spec.clone(),
        grid,
        scheme: disc.scheme(),
        dt,
        checkpoints,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::model::{build_preset, params};

    #[test]
    fn zero_is_a_fixed_point() {
        let g = make_grid(20.0, 256).unwrap();
        let spec = build_preset("dai", &params([("gamma", 1.0)])).unwrap();
        let zero = GridFunction::zeros(g);
        let op = HelmholtzOperator::new(g);
        assert_eq!(step_rk4(&spec, &op, &zero, 0.01).unwrap(), zero);
        let traj = evolve(&spec, &zero, &EvolveOptions::new(0.01, 0.5, vec![0.1, 0.3])).unwrap();
        assert_eq!(traj.times(), vec![0.0, 0.1, 0.3, 0.5]);
        for c in &traj.checkpoints {
            assert_eq!(c.u.max_abs(), 0.0);
            assert_eq!(c.h_accumulator.max_abs(), 0.0);
            assert_eq!(c.r_accumulator.max_abs(), 0.0);
        }
    }

    #[test]
    fn options_are_validated() {
        let g = make_grid(20.0, 256).unwrap();
        let spec = build_preset("bbm", &params([])).unwrap();
        let u = GridFunction::zeros(g);
        assert!(evolve(&spec, &u, &EvolveOptions::new(-1.0, 1.0, vec![])).is_err());
        assert!(evolve(&spec, &u, &EvolveOptions::new(0.1, 1.0, vec![0.5, 0.2])).is_err());
        assert!(evolve(&spec, &u, &EvolveOptions::new(0.1, 1.0, vec![2.0])).is_err());
        assert!(evolve(&spec, &u, &EvolveOptions::new(0.1, 1.0, vec![0.55])).is_err());
        assert!(matches!(
            evolve(&spec, &u, &EvolveOptions::new(0.05, 1.0, vec![0.5])).unwrap().checkpoint(0.25),
            Err(Error::NotCheckpointed(_))
        ));
    }

    #[test]
    fn cfl_violation_is_reported() {
        let g = make_grid(20.0, 256).unwrap();
        let spec = build_preset("dai", &params([("gamma", 1.0)])).unwrap();
        let u = GridFunction::from_fn(g, |x| (-x * x).exp()).unwrap();
        let err = evolve(&spec, &u, &EvolveOptions::new(0.2, 1.0, vec![])).unwrap_err();
        assert!(matches!(err, Error::Cfl { step: 0, .. }));
    }

    #[test]
    fn ndjson_has_one_line_per_checkpoint() {
        let g = make_grid(20.0, 256).unwrap();
        let spec = build_preset("dai", &params([("gamma", 1.0)])).unwrap();
        let u = GridFunction::from_fn(g, |x| (-x * x).exp()).unwrap();
        let traj = evolve(&spec, &u, &EvolveOptions::new(0.01, 0.2, vec![0.1])).unwrap();
        let mut buf = Vec::new();
        traj.write_ndjson(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        for key in ["t", "energy", "max_u", "max_ux", "boundary_tail"] {
            assert!(first.get(key).is_some(), "{key}");
        }
        assert_eq!(snapshot_tag(0.1), "0.100000");
    }
}
