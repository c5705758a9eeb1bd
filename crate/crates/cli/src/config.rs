//! Experiment configuration: TOML with dotted sections, unknown keys rejected.
//!
//! ```toml
//! scenario = "conservation"
//! output_dir = "runs/ch"
//! seed = 7
//! weights = ["exp_half", "poly_b(2)"]
//!
//! [model]
//! name = "dai"
//! params = { gamma = 1.0 }
//!
//! [grid]
//! L = 60.0
//! N = 4096
//!
//! [datum]
//! kind = "gaussian"
//! params = { a = 0.1 }
//!
//! [evolve]
//! dt = 1e-3
//! T_final = 5.0
//! checkpoints = [1.0, 2.0, 3.0, 4.0]
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use rodwave_core::datum::Datum;
use rodwave_core::weights::parse_reference;
use rodwave_core::{build_preset, make_grid, DatumKind, EvolveOptions, Grid, ModelSpec, Scheme};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Conservation,
    Profile,
    CompactSupport,
    DecayPersistence,
    WeightedPersistence,
    WeightsSuite,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Conservation => "conservation",
            Scenario::Profile => "profile",
            Scenario::CompactSupport => "compact_support",
            Scenario::DecayPersistence => "decay_persistence",
            Scenario::WeightedPersistence => "weighted_persistence",
            Scenario::WeightsSuite => "weights_suite",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "L")]
    pub half_length: f64,
    #[serde(rename = "N")]
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumSection {
    pub kind: DatumKind,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// CSV input for `custom_csv`, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub dt: f64,
    #[serde(rename = "T_final")]
    pub t_final: f64,
    #[serde(default)]
    pub checkpoints: Vec<f64>,
    #[serde(default)]
    pub scheme: Scheme,
}

/// Scenario knobs with defaults matching the acceptance settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    /// Exponent `d` of the decay envelope.
    pub envelope_d: f64,
    /// Exponents `p` for weighted norms; `inf` is allowed.
    #[serde(with = "crate::real::vec")]
    pub weighted_p: Vec<f64>,
    /// Abscissa where the compact-support scenario probes the tail.
    pub tail_probe_x: f64,
    /// Random pairs for the weighted Young check in `weights_suite`.
    pub young_pairs: usize,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            envelope_d: 0.75,
            weighted_p: vec![2.0, f64::INFINITY],
            tail_probe_x: 15.0,
            young_pairs: 100,
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("rodwave-out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub weights: Vec<String>,
    pub model: ModelSection,
    pub grid: GridSection,
    pub datum: DatumSection,
    pub evolve: EvolveSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
}

impl FromStr for ExperimentConfig {
    type Err = anyhow::Error;

    fn from_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    /// Read and validate a config file; a relative CSV path is resolved
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if let Some(csv) = cfg.datum.path.as_mut() {
            if csv.is_relative() {
                if let Some(dir) = path.parent() {
                    *csv = dir.join(&*csv);
                }
            }
        }
        cfg.validate().with_context(|| format!("validating {}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec()?;
        // Sampling catches grid-dependent datum errors (bump width, CSV shape).
        self.datum()?.sample(&self.grid()?)?;
        self.evolve_options().validate()?;
        for w in &self.weights {
            parse_reference(w)?;
        }
        if self.scenario == Scenario::WeightedPersistence && self.weights.is_empty() {
            bail!("scenario `weighted_persistence` needs a nonempty `weights` list");
        }
        if self.diagnostics.weighted_p.iter().any(|p| p.is_nan() || *p < 2.0) {
            bail!("diagnostics.weighted_p entries must lie in [2, inf]");
        }
        if !(self.diagnostics.envelope_d > 0.5) {
            bail!("diagnostics.envelope_d must exceed 1/2");
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<ModelSpec> {
        Ok(build_preset(&self.model.name, &self.model.params)?)
    }

    pub fn grid(&self) -> Result<Grid> {
        Ok(make_grid(self.grid.half_length, self.grid.points)?)
    }

    pub fn datum(&self) -> Result<Datum> {
        let datum = Datum::from_params(self.datum.kind, &self.datum.params, self.datum.path.as_deref())?;
        datum.validate()?;
        Ok(datum)
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions::new(self.evolve.dt, self.evolve.t_final, self.evolve.checkpoints.clone())
            .with_scheme(self.evolve.scheme)
    }
}
