//! Experiment configuration, dispatch and persisted reports.
//!
//! Every experiment draws its randomness from sub-streams of the master seed
//! (see [`crate::derive_seed`]): stream `(experiment name, index)` for the
//! experiment body, and further labelled children for individual trials.

mod experiments;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::attacks::Adversary;
use crate::ensembles::PrfBackend;
use crate::{Error, Result};

pub use experiments::EXPERIMENTS;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Default output directory when neither the flag nor the config sets a path.
pub const OUT_DIR_ENV: &str = "PRSBENCH_OUT_DIR";

pub const CONFIG_SCHEMA: &str = include_str!("../../schema/config.schema.json");
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

/// Numeric parameters; unset fields take the experiment's default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batches: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observables: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_shadow: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<PrfBackend>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backends: Option<Vec<PrfBackend>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permanent_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forced_hidden: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collision_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniformity_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniformity_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub queries: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adversary: Option<Adversary>,
}

impl Params {
    /// Fields set in `other` replace those in `self`.
    pub fn overlay(&mut self, other: &Params) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(
            n, m, t, key_count, trials, samples, epsilons, eps, delta, threshold, tolerance, batches,
            observables, c_shadow, design_c, pairs, backend, backends, mc_samples, permanent_cap,
            forced_hidden, collision_samples, uniformity_n, uniformity_samples, family_sizes, queries,
            adversary
        );
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub experiment: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

impl ExperimentConfig {
    pub fn new(experiment: impl Into<String>, seed: u64) -> Self {
        Self { schema_version: SCHEMA_VERSION, experiment: experiment.into(), seed, params: Params::default(), out: None }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(Error::from)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The config with every default filled in.
    pub fn resolved(&self) -> Result<Self> {
        let mut params = experiments::defaults(&self.experiment)?;
        params.overlay(&self.params);
        Ok(Self { params, ..self.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub name: String,
    pub description: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub artifact_version: String,
    pub experiment: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub metrics: BTreeMap<String, Metric>,
    pub targets: Vec<Target>,
    pub passed: bool,
    pub details: serde_json::Value,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).map(|m| m.value)
    }

    pub fn target(&self, name: &str) -> Option<bool> {
        self.targets.iter().find(|t| t.name == name).map(|t| t.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The report with the wall-clock field zeroed, for reproducibility checks.
    pub fn body(&self) -> Self {
        Self { wall_clock_seconds: 0.0, ..self.clone() }
    }
}

/// Collects metrics and targets while an experiment runs.
#[derive(Debug, Default)]
pub(crate) struct Outcome {
    metrics: BTreeMap<String, Metric>,
    targets: Vec<Target>,
    details: serde_json::Map<String, serde_json::Value>,
}

impl Outcome {
    pub(crate) fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), Metric { value, stderr: None });
    }

    pub(crate) fn metric_se(&mut self, name: &str, value: f64, stderr: f64) {
        self.metrics.insert(name.to_string(), Metric { value, stderr: Some(stderr) });
    }

    pub(crate) fn target(&mut self, name: &str, description: impl Into<String>, passed: bool) {
        self.targets.push(Target { name: name.to_string(), description: description.into(), passed });
    }

    pub(crate) fn detail(&mut self, name: &str, value: impl Serialize) -> Result<()> {
        self.details.insert(name.to_string(), serde_json::to_value(value)?);
        Ok(())
    }
}

/// All precondition violations of `config`, empty when it is runnable.
pub fn validate_config(config: &ExperimentConfig) -> Vec<String> {
    let mut errors = Vec::new();
    if config.schema_version != SCHEMA_VERSION {
        errors.push(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", config.schema_version));
    }
    match config.resolved() {
        Ok(resolved) => experiments::validate(&resolved.experiment, &resolved.params, &mut errors),
        Err(e) => errors.push(e.to_string()),
    }
    errors
}

/// Validates, runs and returns the report without writing it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    let resolved = config.resolved()?;
    let errors = validate_config(&resolved);
    if !errors.is_empty() {
        return Err(Error::InvalidConfig(errors));
    }
    let start = Instant::now();
    let outcome = experiments::run(&resolved)?;
    let passed = outcome.targets.iter().all(|t| t.passed);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        artifact_version: ARTIFACT_VERSION.to_string(),
        experiment: resolved.experiment.clone(),
        seed: resolved.seed,
        config: resolved,
        metrics: outcome.metrics,
        targets: outcome.targets,
        passed,
        details: serde_json::Value::Object(outcome.details),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Report path: explicit override, then the config's `out`, then
/// `$PRSBENCH_OUT_DIR/<experiment>-<seed>.json`, then the working directory.
pub fn output_path(config: &ExperimentConfig, override_path: Option<&Path>, env_dir: Option<&Path>) -> PathBuf {
    if let Some(p) = override_path.or(config.out.as_deref()) {
        return p.to_path_buf();
    }
    let file = format!("{}-{}.json", config.experiment, config.seed);
    env_dir.map_or_else(|| PathBuf::from(&file), |d| d.join(&file))
}

pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    let mut text = report.to_json()?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_experiment_lists_registry() {
        let err = run_experiment(&ExperimentConfig::new("nope", 1)).unwrap_err();
        match err {
            Error::UnknownExperiment { name, registered } => {
                assert_eq!(name, "nope");
                assert!(registered.contains("distinguish"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_collects_every_violation() {
        let mut cfg = ExperimentConfig::new("haar-tail", 1);
        cfg.params.n = Some(30);
        cfg.params.samples = Some(0);
        let errors = validate_config(&cfg);
        assert_eq!(errors.len(), 2, "{errors:?}");
        assert!(errors.iter().any(|e| e.contains("n = 30")));
        assert!(validate_config(&ExperimentConfig::new("haar-tail", 1)).is_empty());
        let mut cfg = ExperimentConfig::new("distinguish", 1);
        cfg.params.trials = Some(0);
        assert!(validate_config(&cfg).iter().any(|e| e.contains("trials")));
    }

    #[test]
    fn output_path_precedence() {
        let mut cfg = ExperimentConfig::new("norms-check", 5);
        assert_eq!(output_path(&cfg, None, None), PathBuf::from("norms-check-5.json"));
        assert_eq!(output_path(&cfg, None, Some(Path::new("/r"))), PathBuf::from("/r/norms-check-5.json"));
        cfg.out = Some("c.json".into());
        assert_eq!(output_path(&cfg, None, Some(Path::new("/r"))), PathBuf::from("c.json"));
        assert_eq!(output_path(&cfg, Some(Path::new("o.json")), None), PathBuf::from("o.json"));
    }

    #[test]
    fn config_roundtrip_and_unknown_fields() {
        let cfg = ExperimentConfig::from_json(r#"{"experiment":"haar-tail","seed":3,"params":{"n":4}}"#).unwrap();
        assert_eq!(cfg.params.n, Some(4));
        let back = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, back);
        assert!(ExperimentConfig::from_json(r#"{"experiment":"haar-tail","params":{"bogus":1}}"#).is_err());
    }

    #[test]
    fn schemas_are_json() {
        for s in [CONFIG_SCHEMA, REPORT_SCHEMA] {
            let v: serde_json::Value = serde_json::from_str(s).unwrap();
            assert!(v.get("$schema").is_some());
        }
    }
}
