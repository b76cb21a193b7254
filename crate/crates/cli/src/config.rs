//! Experiment configuration: one JSON file plus command-line overrides.

use std::path::Path;

use anyhow::{bail, Context};
use colmix::io::Units;
use colmix::mixing::DEFAULT_DENSE_CAP;
use colmix::verify::DEFAULT_SEED;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::Invalid;

/// The on-disk config; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub units: Option<Units>,
    pub dense_cap: Option<usize>,
    pub command: Option<CommandSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandSection {
    pub name: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

/// Fully resolved configuration, as recorded in the run manifest. Feeding it
/// back through `--config` reproduces the run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub units: Units,
    pub dense_cap: usize,
    pub command: CommandSection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Ok(serde_json::from_str(&text).map_err(|e| Invalid::new(format!("config {}: {e}", path.display())))?)
    }
}

/// `key=value`, where the value is JSON; anything that does not parse as JSON
/// is taken as a bare string (so `method=dense` works unquoted).
pub fn parse_param(raw: &str) -> Result<(String, Value), String> {
    let (key, value) = raw.split_once('=').ok_or_else(|| format!("expected key=value, got {raw:?}"))?;
    if key.is_empty() {
        return Err(format!("empty parameter name in {raw:?}"));
    }
    let value = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
    Ok((key.to_string(), value))
}

pub fn parse_units(raw: &str) -> Result<Units, String> {
    match raw {
        "nats" => Ok(Units::Nats),
        "bits" => Ok(Units::Bits),
        other => Err(format!("unknown units {other:?} (expected nats or bits)")),
    }
}

pub struct Overrides {
    pub seed: Option<u64>,
    pub units: Option<Units>,
    pub dense_cap: Option<usize>,
    pub params: Vec<(String, Value)>,
}

/// Layers defaults, the config file and flags, in that order.
pub fn resolve(name: Option<&str>, file: ConfigFile, overrides: Overrides) -> anyhow::Result<ExperimentConfig> {
    let mut command = match (name, file.command) {
        (Some(n), Some(c)) if c.name != n => {
            bail!(Invalid::new(format!("config file is for command {:?}, not {n:?}", c.name)))
        }
        (_, Some(c)) => c,
        (Some(n), None) => CommandSection { name: n.to_string(), params: Map::new() },
        (None, None) => bail!(Invalid::new("no command given on the command line or in the config file")),
    };
    for (k, v) in overrides.params {
        command.params.insert(k, v);
    }
    let dense_cap = overrides.dense_cap.or(file.dense_cap).unwrap_or(DEFAULT_DENSE_CAP);
    if dense_cap == 0 {
        bail!(Invalid::new("dense_cap must be positive"));
    }
    Ok(ExperimentConfig {
        seed: overrides.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        units: overrides.units.or(file.units).unwrap_or_default(),
        dense_cap,
        command,
    })
}
