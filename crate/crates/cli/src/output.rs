//! Files written for a run and read back by `rodwave verdict`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use rodwave_core::evolve::snapshot_tag;
use rodwave_core::weights::AdmissibilityReport;
use rodwave_core::{Checkpoint, HypothesisReport};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Scenario};
use crate::verdict::Verdict;

pub const MANIFEST: &str = "run_manifest.json";
pub const SERIES: &str = "series.ndjson";
pub const SERIES_CSV: &str = "series.csv";
pub const VERDICT: &str = "verdict.json";
pub const WEIGHTS_REPORT: &str = "weights_report.json";
pub const PLOT: &str = "plot.gp";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub rodwave_core: String,
    pub rodwave_cli: String,
}

impl Versions {
    pub fn current() -> Self {
        Self {
            rodwave_core: rodwave_core::VERSION.to_string(),
            rodwave_cli: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub versions: Versions,
    pub hypotheses: HypothesisReport,
    pub hypothesis_failures: Vec<String>,
    /// The run went ahead despite failed hypotheses.
    pub forced: bool,
}

/// Per-checkpoint diagnostics; unavailable values are `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub energy: f64,
    pub max_u: f64,
    pub max_ux: f64,
    pub lambda_plus: Option<f64>,
    pub lambda_minus: Option<f64>,
    pub envelope_sup: Option<f64>,
    /// `‖φu‖_p + ‖φu_x‖_p` keyed by `"{weight} p={p}"`.
    pub weighted_norm: Option<BTreeMap<String, f64>>,
    pub boundary_tail: f64,
    /// Profile-identity residual over `‖u‖∞` (absolute when `u ≡ 0`).
    pub profile_residual: Option<f64>,
    pub tail_relative_error: Option<f64>,
    /// `u(t, x_probe)` for the compact-support scenario.
    pub u_probe: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightsReport {
    pub admissibility: Vec<AdmissibilityReport>,
    pub truncation_failures: Vec<String>,
    pub young_pairs: usize,
    #[serde(with = "crate::real::scalar")]
    pub young_worst_ratio: f64,
    pub young_failures: usize,
    #[serde(with = "crate::real::scalar")]
    pub kernel_norm_error: f64,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(&dir.join(name))?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(dir: &Path, name: &str) -> Result<T> {
    let path = dir.join(name);
    let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_series(dir: &Path, rows: &[SeriesRow]) -> Result<()> {
    let mut w = create(&dir.join(SERIES))?;
    for row in rows {
        serde_json::to_writer(&mut w, row)?;
        writeln!(w)?;
    }
    w.flush()?;
    let mut c = create(&dir.join(SERIES_CSV))?;
    writeln!(c, "t,energy,max_u,max_ux,lambda_plus,lambda_minus,envelope_sup,boundary_tail")?;
    let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |v| format!("{v:e}"));
    for r in rows {
        writeln!(
            c,
            "{:e},{:e},{:e},{:e},{},{},{},{:e}",
            r.t,
            r.energy,
            r.max_u,
            r.max_ux,
            opt(r.lambda_plus),
            opt(r.lambda_minus),
            opt(r.envelope_sup),
            r.boundary_tail
        )?;
    }
    c.flush()?;
    Ok(())
}

pub fn read_series(dir: &Path) -> Result<Vec<SeriesRow>> {
    let path = dir.join(SERIES);
    let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
    BufReader::new(file)
        .lines()
        .enumerate()
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|(i, line)| {
            let line = line?;
            serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))
        })
        .collect()
}

pub fn snapshot_name(t: f64) -> String {
    format!("snapshot_t{}.csv", snapshot_tag(t))
}

/// `x,u,u_x` at one checkpoint.
pub fn write_snapshot(dir: &Path, c: &Checkpoint) -> Result<()> {
    let mut w = create(&dir.join(snapshot_name(c.t)))?;
    writeln!(w, "x,u,u_x")?;
    let g = c.u.grid();
    for (j, x) in g.nodes().enumerate() {
        writeln!(w, "{x:e},{:e},{:e}", c.u.values()[j], c.ux.values()[j])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_verdict(dir: &Path, verdict: &Verdict) -> Result<()> {
    write_json(dir, VERDICT, verdict)
}

/// A gnuplot script over the CSVs: the energy series and `|u|` snapshots on a log scale.
pub fn write_plot(dir: &Path, scenario: Scenario, snapshot_times: &[f64]) -> Result<()> {
    let mut w = create(&dir.join(PLOT))?;
    writeln!(w, "# gnuplot script for scenario {scenario}; run with `gnuplot -p plot.gp`")?;
    writeln!(w, "set datafile separator ','")?;
    writeln!(w, "set key autotitle columnhead")?;
    writeln!(w, "set multiplot layout 2,1 title '{scenario}'")?;
    writeln!(w, "set xlabel 't'")?;
    writeln!(w, "set ylabel 'H(t)'")?;
    writeln!(w, "plot '{SERIES_CSV}' using 1:2 with linespoints")?;
    writeln!(w, "set xlabel 'x'")?;
    writeln!(w, "set ylabel '|u|'")?;
    writeln!(w, "set logscale y")?;
    let curves: Vec<String> = snapshot_times
        .iter()
        .map(|&t| format!("'{}' using 1:(abs($2)) with lines title 't = {t}'", snapshot_name(t)))
        .collect();
    if curves.is_empty() {
        writeln!(w, "# no snapshots were written")?;
    } else {
        writeln!(w, "plot {}", curves.join(", \\\n     "))?;
    }
    writeln!(w, "unset multiplot")?;
    w.flush()?;
    Ok(())
}
