//! Many configs in parallel, each into its own directory.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::experiment::{run_experiment, RunOptions};
use crate::EXIT_CONFIG;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "RODWAVE_THREADS";

#[derive(Clone, Debug)]
pub struct SweepEntry {
    pub config: PathBuf,
    pub dir: Option<PathBuf>,
    pub exit_code: i32,
    pub message: String,
}

/// Worker count: the request, capped by `RODWAVE_THREADS` when set.
pub fn worker_count(requested: Option<usize>) -> usize {
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0);
    let n = requested
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    cap.map_or(n, |c| n.min(c))
}

pub fn expand(pattern: &str) -> Result<Vec<PathBuf>> {
    let mut paths = glob::glob(pattern)
        .with_context(|| format!("bad pattern `{pattern}`"))?
        .collect::<std::result::Result<Vec<_>, _>>()?;
    paths.sort();
    if paths.is_empty() {
        bail!("no config matches `{pattern}`");
    }
    Ok(paths)
}

fn run_one(path: &Path) -> SweepEntry {
    let attempt = ExperimentConfig::load(path).and_then(|cfg| {
        let stem = path.file_stem().map_or_else(|| "run".into(), |s| s.to_os_string());
        let dir = cfg.output_dir.join(stem);
        let outcome = run_experiment(
            &cfg,
            &RunOptions {
                force: false,
                output_dir: Some(dir),
            },
        )?;
        Ok(outcome)
    });
    match attempt {
        Ok(o) => SweepEntry {
            config: path.to_path_buf(),
            message: o.verdict.reason.clone().unwrap_or_else(|| "pass".into()),
            exit_code: o.exit_code(),
            dir: Some(o.dir),
        },
        Err(e) => SweepEntry {
            config: path.to_path_buf(),
            dir: None,
            exit_code: EXIT_CONFIG,
            message: format!("{e:#}"),
        },
    }
}

/// Run every config matching `pattern`; results come back in path order.
/// Each run writes to `<output_dir>/<config stem>`, so runs never share files.
pub fn sweep(pattern: &str, jobs: Option<usize>) -> Result<Vec<SweepEntry>> {
    let paths = expand(pattern)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(worker_count(jobs)).build()?;
    Ok(pool.install(|| paths.par_iter().map(|p| run_one(p)).collect()))
}

/// The worst exit code of a sweep, `0` when every run passed.
pub fn sweep_exit_code(entries: &[SweepEntry]) -> i32 {
    entries.iter().map(|e| e.exit_code).max().unwrap_or(0)
}
