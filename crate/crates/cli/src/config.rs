//! JSON run configuration with dotted-path overrides.
//!
//! Resolution order: built-in defaults, then the config file (deep-merged),
//! then each `--set key=value` in order. The merged document is deserialized
//! strictly, so unknown keys anywhere are rejected.

use std::path::Path;

use rumorsim::abm::{AbmConfig, SimMode};
use rumorsim::experiment::SweepSpec;
use rumorsim::ledger::LedgerParams;
use rumorsim::model::{BlockRateParams, Epsilon, PopulationConfig};
use rumorsim::ode::IntegratorConfig;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Classic model; only the non-enrolled rates are used.
    Sir,
    Bsir,
}

/// Agent-simulation settings; population and rates come from the top level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbmSection {
    pub graph_seed: u64,
    pub sim_seed: u64,
    pub dt: f64,
    pub t_end: f64,
    pub mode: SimMode,
    pub ledger: LedgerParams,
    pub is_rumor: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    /// CSV destination; standard output when absent.
    pub csv: Option<String>,
    /// Line plot of the density (or count) columns.
    pub svg: Option<String>,
    /// JSON export of the ledger chain (agent runs in ledger mode).
    pub chain: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    pub rates: BlockRateParams,
    pub pop: PopulationConfig,
    pub integrator: IntegratorConfig,
    pub abm: AbmSection,
    pub sweep: SweepSpec,
    pub output: OutputPaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelKind::Bsir,
            rates: BlockRateParams::reference(0.1, 0.3, 10.0),
            pop: PopulationConfig {
                n: 10_000,
                a: 1,
                epsilon: Epsilon::Finite(0.1),
            },
            integrator: IntegratorConfig {
                dt: 0.01,
                t_end: 20.0,
                extinction_threshold: 1e-4,
            },
            abm: AbmSection {
                graph_seed: 1,
                sim_seed: 1,
                dt: 0.01,
                t_end: 20.0,
                mode: SimMode::Parametric,
                ledger: LedgerParams::default(),
                is_rumor: true,
            },
            sweep: SweepSpec::default(),
            output: OutputPaths::default(),
        }
    }
}

impl RunConfig {
    /// Loads `path` (if any) over the defaults and applies `overrides`.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut doc = serde_json::to_value(RunConfig::default()).expect("defaults serialize");
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
            let file: Value =
                serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            if !file.is_object() {
                return Err(CliError::config(format!(
                    "{}: top level must be a JSON object",
                    path.display()
                )));
            }
            merge(&mut doc, file);
        }
        for item in overrides {
            apply_override(&mut doc, item)?;
        }
        serde_path_to_error::deserialize(doc).map_err(|e| {
            let at = e.path().to_string();
            CliError::config(format!("{at}: {}", e.into_inner()))
        })
    }

    /// Population as simulated: the classic model has no enrolled class.
    pub fn effective_pop(&self) -> PopulationConfig {
        match self.model {
            ModelKind::Sir => PopulationConfig {
                epsilon: Epsilon::Finite(0.0),
                ..self.pop
            },
            ModelKind::Bsir => self.pop,
        }
    }

    pub fn validate_ode(&self) -> Result<(), CliError> {
        self.check_common()?;
        self.integrator.validate().map_err(|e| group("integrator", e))
    }

    pub fn validate_sweep(&self) -> Result<(), CliError> {
        self.validate_ode()?;
        if self.model != ModelKind::Bsir {
            return Err(CliError::config("model: sweeps need the bsir model"));
        }
        self.sweep
            .validate(self.integrator.t_end)
            .map_err(|e| group("sweep", e))
    }

    pub fn abm_config(&self) -> Result<AbmConfig, CliError> {
        self.check_common()?;
        let a = &self.abm;
        a.ledger.validate().map_err(|e| group("abm.ledger", e))?;
        let config = AbmConfig {
            pop: self.effective_pop(),
            rates: self.rates,
            graph_seed: a.graph_seed,
            sim_seed: a.sim_seed,
            dt: a.dt,
            t_end: a.t_end,
            mode: a.mode,
            ledger: a.ledger,
            is_rumor: a.is_rumor,
        };
        config.validate().map_err(|e| group("abm", e))?;
        Ok(config)
    }

    fn check_common(&self) -> Result<(), CliError> {
        self.rates.validate(false).map_err(|e| group("rates", e))?;
        self.pop.validate().map_err(|e| group("pop", e))
    }
}

fn group(name: &str, err: impl std::fmt::Display) -> CliError {
    CliError::config(format!("{name}.{err}"))
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(base), Value::Object(patch)) => {
            for (key, value) in patch {
                match base.get_mut(&key) {
                    Some(slot) if slot.is_object() && value.is_object() => merge(slot, value),
                    _ => {
                        base.insert(key, value);
                    }
                }
            }
        }
        (base, patch) => *base = patch,
    }
}

/// `a.b.c=value`; the value is parsed as JSON when possible, otherwise taken as a string.
fn apply_override(doc: &mut Value, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("--set {item}: expected key=value")))?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(CliError::config(format!("--set {item}: empty key segment")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut slot = doc;
    let mut parts = key.split('.').peekable();
    while let Some(part) = parts.next() {
        let Value::Object(map) = slot else {
            return Err(CliError::config(format!(
                "--set {key}: '{part}' is not inside an object"
            )));
        };
        if parts.peek().is_none() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        slot = map.entry(part).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split yields at least one segment")
}
