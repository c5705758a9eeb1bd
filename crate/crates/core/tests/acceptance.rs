//! Acceptance run: one PASS/FAIL line per criterion, every tolerance pinned
//! below. Expensive trajectories are computed once and shared.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rodwave_core::diagnostics::{decay_envelope, lambda_pm, profile_decompose, weighted_persistence};
use rodwave_core::model::params;
use rodwave_core::weights::{parse_reference, CatalogName, Lattice, SLACK};
use rodwave_core::{
    build_preset, catalog, check_admissible, convolve_oracle, estimate_moderate_constant, evolve, helmholtz_inverse,
    lp_norm, make_datum, make_grid, truncate, validate_hypotheses, young_check, DatumKind, Error, EvolveOptions, Grid,
    GridFunction, HelmholtzOperator, ModelSpec, Trajectory,
};

// Helmholtz inverse.
const COSINE_TOL: f64 = 1e-12;
const KINK_TOL: f64 = 1e-8;
const ORACLE_TOL: f64 = 1e-9;
const ORACLE_INPUTS: usize = 50;
// conservation.
const DRIFT_TOL: f64 = 1e-7;
// integrator order.
const ORDER_RANGE: [f64; 2] = [3.8, 4.2];
// profile identity.
const PROFILE_TOL: f64 = 1e-6;
// compact support.
const TAIL_FIT_TOL: f64 = 0.02;
const TAIL_FLOOR_FACTOR: f64 = 1e3;
// decay persistence.
const ENVELOPE_D: f64 = 0.75;
const ENVELOPE_GROWTH: f64 = 3.0;
// weighted persistence.
const KAPPA_SLACK: f64 = 1.1;
// λ bounds.
const LAMBDA_SYM_TOL: f64 = 1e-10;
const ZERO_LAMBDA_SUP: f64 = 1e-12;
// weights suite.
const YOUNG_PAIRS: usize = 100;
const KERNEL_NORM_TOL: f64 = 1e-6;
// unique continuation.
const ACCUMULATOR_FLOOR: f64 = 1e-300;

/// Amplitude of the Gaussian data in the long runs. Unit-amplitude Gaussians
/// break (‖u_x‖∞ → ∞) before T = 5 on every preset with f'' > 0; at a = 0.1
/// dai γ = 3 steepens toward breaking near t ≈ 6.5 and is under-resolved at
/// N = 4096 by t = 5.
const GAUSSIAN_AMPLITUDE: f64 = 0.05;
/// Bump amplitude for the compact-support run (unit amplitude breaks near t = 1).
const BUMP_AMPLITUDE: f64 = 0.25;

const L: f64 = 60.0;
const N: usize = 4096;
const DT: f64 = 1e-3;

struct Run {
    label: String,
    spec: ModelSpec,
    traj: Trajectory,
    even: bool,
    odd: bool,
}

struct Verdict {
    failures: usize,
}

impl Verdict {
    fn line(&mut self, id: usize, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("[{}] {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        std::io::stdout().flush().ok();
    }
}

fn grid() -> Grid {
    make_grid(L, N).unwrap()
}

fn gaussian(g: &Grid, a: f64) -> GridFunction {
    let mut p = BTreeMap::new();
    p.insert("a".to_string(), a);
    make_datum(DatumKind::Gaussian, &p, g).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn random_smooth(rng: &mut ChaCha8Rng, g: Grid) -> GridFunction {
    let terms: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..5))
        .map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(-6.0..6.0), rng.gen_range(0.6..2.0)))
        .collect();
    GridFunction::from_fn(g, |x| terms.iter().map(|(a, c, w)| a * (-((x - c) / w).powi(2)).exp()).sum()).unwrap()
}

fn helmholtz(v: &mut Verdict) {
    let g = make_grid(PI, 64).unwrap();
    let op = HelmholtzOperator::new(g);
    let mut cos_err: f64 = 0.0;
    for k in [1.0, 2.0, 5.0] {
        let h = GridFunction::from_fn(g, |x| (k * x).cos()).unwrap();
        let out = helmholtz_inverse(&op, &h).unwrap();
        for (x, y) in g.nodes().zip(out.values()) {
            cos_err = cos_err.max((y - (k * x).cos() / (1.0 + k * k)).abs());
        }
    }
    // Λ⁻²e^{−2|x|} = (2e^{−|x|} − e^{−2|x|})/3 on the line; the kink limits
    // the discrete error to O(dx²), hence the fine grid.
    let g = make_grid(L, 1 << 21).unwrap();
    let op = HelmholtzOperator::new(g);
    let h = GridFunction::from_fn(g, |x| (-2.0 * x.abs()).exp()).unwrap();
    let out = helmholtz_inverse(&op, &h).unwrap();
    let kink_err = g
        .nodes()
        .zip(out.values())
        .fold(0.0f64, |m, (x, y)| m.max((y - (2.0 * (-x.abs()).exp() - (-2.0 * x.abs()).exp()) / 3.0).abs()));
    let g = make_grid(20.0, 512).unwrap();
    let op = HelmholtzOperator::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut oracle_err: f64 = 0.0;
    for _ in 0..ORACLE_INPUTS {
        let h = random_smooth(&mut rng, g);
        let fast = helmholtz_inverse(&op, &h).unwrap();
        let slow = convolve_oracle(&g, &h).unwrap();
        oracle_err = oracle_err.max(max_diff(fast.values(), slow.values()) / slow.max_abs());
    }
    v.line(
        1,
        "helmholtz",
        cos_err <= COSINE_TOL && kink_err <= KINK_TOL && oracle_err <= ORACLE_TOL,
        format!(
            "cos k∈{{1,2,5}} err {cos_err:.2e} (tol {COSINE_TOL:.0e}); e^-2|x| err {kink_err:.2e} (tol {KINK_TOL:.0e}, N=2^21); \
             oracle rel err {oracle_err:.2e} over {ORACLE_INPUTS} inputs (tol {ORACLE_TOL:.0e})"
        ),
    );
}

fn conservation_presets() -> Vec<(String, ModelSpec)> {
    [
        ("bbm", params([])),
        ("dai", params([("gamma", 0.0)])),
        ("dai", params([("gamma", 1.0)])),
        ("dai", params([("gamma", 2.0)])),
        ("dai", params([("gamma", 3.0)])),
        ("dgh_reduced", params([("Gamma_hat", 0.0)])),
        ("rch", params([("beta", 1.0), ("gamma", 1.0), ("Gamma", 0.0)])),
    ]
    .into_iter()
    .map(|(name, p)| {
        let label = if p.is_empty() {
            name.to_string()
        } else {
            let args: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{name}({})", args.join(","))
        };
        (label, build_preset(name, &p).unwrap())
    })
    .collect()
}

fn conservation(v: &mut Verdict, runs: &mut Vec<Run>) {
    let u0 = gaussian(&grid(), GAUSSIAN_AMPLITUDE);
    let mut worst = (0.0f64, String::new());
    let mut all_pass = true;
    let mut parts = Vec::new();
    for (label, spec) in conservation_presets() {
        let start = Instant::now();
        let traj = evolve(&spec, &u0, &EvolveOptions::new(DT, 5.0, vec![0.5, 1.0, 2.0, 3.0, 4.0])).unwrap();
        let h0 = traj.initial().energy;
        let drift = traj.checkpoints.iter().map(|c| ((c.energy - h0) / h0).abs()).fold(0.0, f64::max);
        let ok = drift <= DRIFT_TOL && traj.truncated.is_none();
        all_pass &= ok;
        if drift >= worst.0 {
            worst = (drift, label.clone());
        }
        parts.push(format!("{label} {drift:.1e} ({:.0}s)", start.elapsed().as_secs_f64()));
        runs.push(Run {
            label,
            spec,
            traj,
            even: true,
            odd: false,
        });
    }
    v.line(
        2,
        "conservation",
        all_pass,
        format!(
            "max relative H drift {:.2e} ({}) (tol {DRIFT_TOL:.0e}; Gaussian a={GAUSSIAN_AMPLITUDE}, L={L}, N={N}, dt={DT}, T=5) [{}]",
            worst.0,
            worst.1,
            parts.join("; ")
        ),
    );
}

fn integrator_order(v: &mut Verdict) {
    let spec = build_preset("dai", &params([("gamma", 1.0)])).unwrap();
    let u0 = gaussian(&grid(), 1.0);
    let finals: Vec<GridFunction> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| evolve(&spec, &u0, &EvolveOptions::new(dt, 1.0, vec![])).unwrap().last().u.clone())
        .collect();
    let e1 = max_diff(finals[0].values(), finals[1].values());
    let e2 = max_diff(finals[1].values(), finals[2].values());
    let order = (e1 / e2).log2();
    v.line(
        3,
        "integrator order",
        (ORDER_RANGE[0]..=ORDER_RANGE[1]).contains(&order),
        format!(
            "Richardson order {order:.3} from dt∈{{4e-3,2e-3,1e-3}} (‖u₄−u₂‖∞={e1:.2e}, ‖u₂−u₁‖∞={e2:.2e}) \
             (range [{}, {}]; CH Gaussian a=1, T=1)",
            ORDER_RANGE[0], ORDER_RANGE[1]
        ),
    );
}

fn profile_identity(v: &mut Verdict, runs: &[Run]) {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    let mut ok = true;
    for label in ["dai(gamma=1)", "dai(gamma=2)"] {
        let run = runs.iter().find(|r| r.label == label).unwrap();
        for t in [0.5, 1.0, 2.0] {
            match profile_decompose(&run.traj, t) {
                Ok(r) => {
                    let rel = r.residual_max / run.traj.checkpoint(t).unwrap().u.max_abs();
                    worst = worst.max(rel);
                    ok &= rel <= PROFILE_TOL;
                    parts.push(format!("{label} t={t} {rel:.1e}"));
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("{label} t={t} error: {e}"));
                }
            }
        }
    }
    v.line(
        4,
        "profile identity",
        ok,
        format!("max residual/‖u‖∞ {worst:.2e} (tol {PROFILE_TOL:.0e}) [{}]", parts.join("; ")),
    );
}

fn compact_support(v: &mut Verdict, runs: &mut Vec<Run>) {
    let spec = build_preset("dai", &params([("gamma", 2.0)])).unwrap();
    let mut p = BTreeMap::new();
    p.insert("a".to_string(), BUMP_AMPLITUDE);
    p.insert("rho".to_string(), 1.0);
    let u0 = make_datum(DatumKind::Bump, &p, &grid()).unwrap();
    let times: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
    let traj = evolve(&spec, &u0, &EvolveOptions::new(DT, 1.0, times)).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for t in [0.1, 0.5, 1.0] {
        match profile_decompose(&traj, t) {
            Ok(r) => match r.tail_fit {
                Some(fit) => {
                    let window_ok = (fit.x_window[0] - 6.0).abs() <= 0.1 && fit.x_window[1] == 50.0;
                    ok &= window_ok && fit.relative_error <= TAIL_FIT_TOL;
                    parts.push(format!(
                        "t={t} fit {:.1e} on [{:.2},{}]",
                        fit.relative_error, fit.x_window[0], fit.x_window[1]
                    ));
                }
                None => {
                    ok = false;
                    parts.push(format!("t={t} no fit"));
                }
            },
            Err(e) => {
                ok = false;
                parts.push(format!("t={t} error: {e}"));
            }
        }
    }
    let j15 = traj.grid.nearest_index(15.0);
    let mut min_margin = f64::INFINITY;
    for c in traj.checkpoints.iter().filter(|c| c.t >= 0.1 - 1e-12) {
        let floor = TAIL_FLOOR_FACTOR * f64::EPSILON * c.u.max_abs();
        let margin = c.u.values()[j15] / floor;
        min_margin = min_margin.min(margin);
        ok &= margin > 1.0;
    }
    v.line(
        5,
        "compact support lost",
        ok,
        format!(
            "tail fit ≤ {TAIL_FIT_TOL} [{}]; min u(t,15)/({TAIL_FLOOR_FACTOR:.0e}·eps·‖u‖∞) over t∈[0.1,1] = {min_margin:.2e} (> 1) \
             (bump a={BUMP_AMPLITUDE}, ρ=1, dai γ=2)",
            parts.join("; ")
        ),
    );
    runs.push(Run {
        label: "bump dai(gamma=2)".into(),
        spec,
        traj,
        even: true,
        odd: false,
    });
}

fn decay_persistence(v: &mut Verdict, runs: &mut Vec<Run>) {
    let spec = build_preset("dai", &params([("gamma", 1.0)])).unwrap();
    let mut p = BTreeMap::new();
    p.insert("d_prime".to_string(), 1.0);
    let u0 = make_datum(DatumKind::EnvelopeClass, &p, &grid()).unwrap();
    let times: Vec<f64> = (1..8).map(|k| k as f64 / 4.0).collect();
    let traj = evolve(&spec, &u0, &EvolveOptions::new(DT, 2.0, times)).unwrap();
    let sups: Vec<(f64, f64, f64)> = traj
        .checkpoints
        .iter()
        .map(|c| {
            let e = decay_envelope(&c.u, &c.ux, ENVELOPE_D).unwrap();
            (c.t, e.sup_value, e.argmax_x)
        })
        .collect();
    let s0 = sups[0].1;
    let worst = sups.iter().map(|s| s.1 / s0).fold(0.0, f64::max);
    let ok = sups.iter().all(|s| s.1.is_finite()) && worst <= ENVELOPE_GROWTH && traj.truncated.is_none();
    let parts: Vec<String> = sups.iter().map(|(t, s, x)| format!("t={t} {s:.3} @{x:.2}")).collect();
    v.line(
        6,
        "decay persistence",
        ok,
        format!(
            "max sup(t)/sup(0) {worst:.3} (tol {ENVELOPE_GROWTH}; envelope_class d'=1, d={ENVELOPE_D}, CH) [{}]",
            parts.join("; ")
        ),
    );
    runs.push(Run {
        label: "envelope_class CH".into(),
        spec,
        traj,
        even: true,
        odd: false,
    });
}

fn weighted(v: &mut Verdict, runs: &mut Vec<Run>) {
    let spec = build_preset("dai", &params([("gamma", 1.0)])).unwrap();
    let times: Vec<f64> = (1..8).map(|k| k as f64 / 4.0).collect();
    let base = evolve(&spec, &gaussian(&grid(), GAUSSIAN_AMPLITUDE), &EvolveOptions::new(DT, 2.0, times.clone())).unwrap();
    let fine_grid = make_grid(L, 4 * N).unwrap();
    let reference = evolve(
        &spec,
        &gaussian(&fine_grid, GAUSSIAN_AMPLITUDE),
        &EvolveOptions::new(DT / 4.0, 2.0, times),
    )
    .unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["exp_half", "poly_b(2)"] {
        let w = parse_reference(name).unwrap();
        for p in [2.0, f64::INFINITY] {
            let k = weighted_persistence(&base, &w, p).unwrap().kappa_hat();
            let k_ref = weighted_persistence(&reference, &w, p).unwrap().kappa_hat();
            ok &= k.is_finite() && k <= KAPPA_SLACK * k_ref;
            parts.push(format!("{name} p={p} κ̂ {k:.6} ref {k_ref:.6}"));
        }
    }
    v.line(
        7,
        "weighted persistence",
        ok,
        format!(
            "κ̂ ≤ {KAPPA_SLACK}·κ̂_ref (reference N={}, dt={}; CH Gaussian a={GAUSSIAN_AMPLITUDE}, T=2) [{}]",
            4 * N,
            DT / 4.0,
            parts.join("; ")
        ),
    );
    runs.push(Run {
        label: "weighted CH".into(),
        spec,
        traj: base,
        even: true,
        odd: false,
    });
}

fn odd_run() -> Run {
    let spec = build_preset("dai", &params([("gamma", 2.0)])).unwrap();
    let u0 = GridFunction::from_fn(grid(), |x| GAUSSIAN_AMPLITUDE * x * (-x * x).exp()).unwrap();
    let traj = evolve(&spec, &u0, &EvolveOptions::new(DT, 1.0, vec![0.25, 0.5, 0.75])).unwrap();
    Run {
        label: "odd dai(gamma=2)".into(),
        spec,
        traj,
        even: false,
        odd: true,
    }
}

fn zero_run() -> Run {
    let spec = build_preset("dai", &params([("gamma", 1.0)])).unwrap();
    let traj = evolve(&spec, &GridFunction::zeros(grid()), &EvolveOptions::new(DT, 1.0, vec![0.5])).unwrap();
    Run {
        label: "zero CH".into(),
        spec,
        traj,
        even: true,
        odd: true,
    }
}

fn lambda_bounds(v: &mut Verdict, runs: &[Run]) {
    let mut evaluated = 0;
    let mut refused = Vec::new();
    let mut ok = true;
    let mut min_lambda = f64::INFINITY;
    let mut worst_sym: f64 = 0.0;
    let mut zero_hits = 0;
    for run in runs {
        for c in &run.traj.checkpoints {
            let (lp, lm) = match lambda_pm(&run.traj, c.t) {
                Ok(pair) => pair,
                Err(Error::BoundaryContamination(_)) => {
                    refused.push(format!("{} t={}", run.label, c.t));
                    continue;
                }
                Err(e) => panic!("{}: {e}", run.label),
            };
            evaluated += 1;
            min_lambda = min_lambda.min(lp.min(lm));
            ok &= lp >= 0.0 && lm >= 0.0;
            // Symmetric pairs: σ = h₀ is even for even data at t = 0, and σ stays
            // even for odd data whenever g and f'' are even (u ↦ −u(−x) is a symmetry).
            if (run.even && c.step == 0) || run.odd {
                let rel = if lp == 0.0 && lm == 0.0 { 0.0 } else { (lp - lm).abs() / lp.max(lm) };
                worst_sym = worst_sym.max(rel);
                ok &= rel <= LAMBDA_SYM_TOL;
            }
            if lp == 0.0 || lm == 0.0 {
                zero_hits += 1;
                ok &= c.u.max_abs() <= ZERO_LAMBDA_SUP;
            }
        }
    }
    v.line(
        8,
        "lambda bounds",
        ok,
        format!(
            "{evaluated} checkpoints, min λ± {min_lambda:.3e} (≥ 0); max symmetric |λ₊−λ₋|/λ {worst_sym:.1e} (tol {LAMBDA_SYM_TOL:.0e}); \
             {zero_hits} zero-λ checkpoints all with ‖u‖∞ ≤ {ZERO_LAMBDA_SUP:.0e}; refused by the boundary guard: [{}]",
            refused.join(", ")
        ),
    );
}

fn weights_suite(v: &mut Verdict) {
    let mut ok = true;
    let mut notes = Vec::new();
    let entries = [
        catalog(CatalogName::ExpHalf, None).unwrap(),
        catalog(CatalogName::ExpA, Some(0.5)).unwrap(),
        catalog(CatalogName::PolyB, Some(2.0)).unwrap(),
        catalog(CatalogName::PaperEnvelopeD, Some(1.0)).unwrap(),
    ];
    for w in &entries {
        let r = check_admissible(w);
        if !r.admissible {
            ok = false;
            notes.push(format!("{} not admissible: {:?}", w.name(), r.failures));
        }
    }
    let lattice = Lattice {
        extent: 40.0,
        points: 1001,
    };
    let xs = lattice.coords();
    for base in &entries {
        let trunc: Vec<_> = [1.0, 10.0, 100.0].iter().map(|&n| truncate(base, n).unwrap()).collect();
        let monotone = xs.iter().all(|&x| {
            let vals: Vec<f64> = trunc.iter().map(|t| t.phi(x)).collect();
            vals.windows(2).all(|p| p[0] <= p[1]) && vals.iter().all(|v| *v <= base.phi(x))
        });
        let converge = {
            let far = truncate(base, 1e300).unwrap();
            xs.iter().all(|&x| far.phi(x) == base.phi(x))
        };
        let bound = base.c0().max(1.0 / base.inf_v());
        let moderate = trunc.iter().all(|t| {
            let est = estimate_moderate_constant(&|x| t.phi(x), &|x| t.v(x), lattice);
            est.c0 <= bound * (1.0 + SLACK)
        });
        if !(monotone && converge && moderate) {
            ok = false;
            notes.push(format!("{}: monotone {monotone}, converge {converge}, moderate {moderate}", base.name()));
        }
    }
    let g = make_grid(20.0, 256).unwrap();
    let young_weights = [
        parse_reference("exp_half").unwrap(),
        parse_reference("poly_b(2)").unwrap(),
        parse_reference("paper_envelope_d(1)").unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut young_worst: f64 = 0.0;
    for _ in 0..YOUNG_PAIRS {
        let f = random_smooth(&mut rng, g);
        let h = random_smooth(&mut rng, g);
        for w in &young_weights {
            for p in [2.0, 4.0, f64::INFINITY] {
                let r = young_check(&f, &h, w, p).unwrap();
                young_worst = young_worst.max(r.lhs / r.rhs);
                ok &= r.ok;
            }
        }
    }
    let g = make_grid(40.0, 1 << 20).unwrap();
    let k = GridFunction::from_fn(g, |x| (-x.abs()).exp()).unwrap();
    let mut norm_err: f64 = 0.0;
    for p in [2.0f64, 4.0, 16.0, 64.0] {
        let exact = (2.0 / p).powf(1.0 / p);
        norm_err = norm_err.max((lp_norm(&k, p).unwrap() - exact).abs() / exact);
    }
    ok &= norm_err <= KERNEL_NORM_TOL;
    v.line(
        9,
        "weights suite",
        ok,
        format!(
            "{} catalog weights admissible; truncations N∈{{1,10,100}} on 1001 points; Young worst lhs/rhs {young_worst:.4} \
             over {YOUNG_PAIRS} pairs × 3 weights × p∈{{2,4,∞}}; ‖e^-|x|‖_p rel err {norm_err:.1e} (tol {KERNEL_NORM_TOL:.0e}){}",
            entries.len(),
            if notes.is_empty() { String::new() } else { format!(" [{}]", notes.join("; ")) }
        ),
    );
}

fn unique_continuation(v: &mut Verdict, runs: &[Run], zero: &Run) {
    let mut ok = true;
    let mut checked = Vec::new();
    let mut min_seen = f64::INFINITY;
    for run in runs {
        if run.traj.initial().u.max_abs() == 0.0 {
            continue;
        }
        let amplitude = run.traj.initial().u.max_abs().max(1.0);
        if !validate_hypotheses(&run.spec, amplitude).unwrap().core_ok() {
            continue;
        }
        let g = run.traj.grid;
        let interior: Vec<usize> = (0..g.point_count()).filter(|&j| g.node(j).abs() <= L - 1.0).collect();
        for c in run.traj.checkpoints.iter().filter(|c| c.step > 0) {
            let m = interior.iter().map(|&j| c.h_accumulator.values()[j]).fold(f64::INFINITY, f64::min);
            min_seen = min_seen.min(m);
            ok &= m > ACCUMULATOR_FLOOR;
        }
        checked.push(run.label.clone());
    }
    let c_end = zero.traj.last();
    let zero_fields = zero.traj.checkpoints.iter().all(|c| {
        c.u.max_abs() == 0.0
            && c.ux.max_abs() == 0.0
            && c.h_accumulator.max_abs() == 0.0
            && c.r_accumulator.max_abs() == 0.0
            && c.energy == 0.0
    });
    let zero_diag = lambda_pm(&zero.traj, c_end.t).unwrap() == (0.0, 0.0)
        && profile_decompose(&zero.traj, c_end.t).unwrap().residual_max == 0.0
        && decay_envelope(&c_end.u, &c_end.ux, 1.0).unwrap().sup_value == 0.0;
    ok &= zero_fields && zero_diag;
    v.line(
        10,
        "unique continuation",
        ok,
        format!(
            "min interior ∫h over {} runs {min_seen:.3e} (> {ACCUMULATOR_FLOOR:.0e}, |x| ≤ L−1) [{}]; zero datum fields {zero_fields}, diagnostics {zero_diag}",
            checked.len(),
            checked.join(", ")
        ),
    );
}

fn main() {
    let start = Instant::now();
    let mut v = Verdict { failures: 0 };
    let mut runs = Vec::new();
    helmholtz(&mut v);
    conservation(&mut v, &mut runs);
    integrator_order(&mut v);
    profile_identity(&mut v, &runs);
    compact_support(&mut v, &mut runs);
    decay_persistence(&mut v, &mut runs);
    weighted(&mut v, &mut runs);
    runs.push(odd_run());
    let zero = zero_run();
    runs.push(zero_run());
    lambda_bounds(&mut v, &runs);
    weights_suite(&mut v);
    unique_continuation(&mut v, &runs, &zero);
    println!(
        "acceptance: {} of 10 criteria failed ({:.0}s)",
        v.failures,
        start.elapsed().as_secs_f64()
    );
    if v.failures > 0 {
        std::process::exit(1);
    }
}
