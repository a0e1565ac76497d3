use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

/// Record of one invocation, written next to its outputs.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Fully resolved settings; accepted back by `--config`.
    pub config: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, config: &impl Serialize, seed: Option<u64>) -> Result<Self, CliError> {
        Ok(RunManifest {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
        })
    }

    /// Writes `<out>/<command>.manifest.json` and returns its path.
    pub fn write(&mut self, out: &Path) -> Result<PathBuf, CliError> {
        let path = out.join(format!("{}.manifest.json", self.command));
        fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(path)
    }
}

/// Reads a config file; a manifest is unwrapped to its `config` object.
pub fn load_config(path: &Path, command: &str) -> Result<Map<String, Value>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {} is not valid JSON: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::Config(format!("config {} must be a JSON object", path.display())));
    };
    if let (Some(Value::String(cmd)), Some(Value::Object(_))) = (map.get("command"), map.get("config")) {
        if cmd != command {
            return Err(CliError::Config(format!(
                "manifest is for `{cmd}`, not `{command}`"
            )));
        }
        let Some(Value::Object(inner)) = map.remove("config") else {
            unreachable!("checked above")
        };
        return Ok(inner);
    }
    Ok(map)
}

/// Overlays the flags that were given onto the config file's values.
pub fn merge<F: Serialize, T: DeserializeOwned>(
    flags: &F,
    config: Option<&Path>,
    command: &str,
) -> Result<T, CliError> {
    let mut merged = match config {
        Some(p) => load_config(p, command)?,
        None => Map::new(),
    };
    if let Value::Object(given) = serde_json::to_value(flags)? {
        for (k, v) in given {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Config(format!("invalid settings: {e}")))
}

pub fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("missing --{flag} (flag or config key)")))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))
}

pub fn fmt9(x: f64) -> String {
    format!("{x:.9}")
}
