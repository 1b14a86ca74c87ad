//! `--config FILE` handling.
//!
//! A config file is a flat JSON object. `out_dir` and `format` are global;
//! every other key must name a field of the selected subcommand and
//! replaces the value given on the command line.

use std::path::{Path, PathBuf};

use contact_thermo::io::OutputFormat;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalOverrides {
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

/// Parsed config file split into global keys and subcommand keys.
#[derive(Debug, Default)]
pub struct ConfigFile {
    pub global: GlobalOverrides,
    pub command: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let Value::Object(mut map) = serde_json::from_str(text).map_err(|e| e.to_string())? else {
            return Err("top level must be a JSON object".into());
        };
        let mut global = Map::new();
        for key in ["out_dir", "format"] {
            if let Some(v) = map.remove(key) {
                global.insert(key.into(), v);
            }
        }
        let global = serde_json::from_value(Value::Object(global)).map_err(|e| e.to_string())?;
        Ok(ConfigFile { global, command: map })
    }

    /// Overlays the subcommand keys on `flags`. Unknown keys are rejected by
    /// the `deny_unknown_fields` attribute on the argument structs.
    pub fn apply<S: Serialize + DeserializeOwned>(&self, flags: &S) -> Result<S, CliError> {
        let Value::Object(mut merged) = serde_json::to_value(flags).map_err(internal)? else {
            return Err(CliError::Invalid("arguments did not serialise to an object".into()));
        };
        for (k, v) in &self.command {
            merged.insert(k.clone(), v.clone());
        }
        serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Invalid(format!("config: {e}")))
    }
}

fn internal(e: serde_json::Error) -> CliError {
    CliError::Invalid(format!("argument encoding: {e}"))
}
