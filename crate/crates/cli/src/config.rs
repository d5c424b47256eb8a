//! Parameter resolution (flag > config file > default) and run manifests.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// Written next to every output file as `<output>.manifest.json`.
/// Passing it back with `--config` reproduces the output.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub parameters: BTreeMap<String, Value>,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
}

pub struct Resolver {
    command: &'static str,
    file: BTreeMap<String, String>,
    resolved: BTreeMap<String, Value>,
    started: Instant,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

fn parse_flat(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::input(format!("config line {}: expected key = value", n + 1))
        })?;
        out.insert(normalize(k), v.trim().to_string());
    }
    Ok(out)
}

fn parse_manifest(text: &str, command: &str) -> Result<BTreeMap<String, String>, CliError> {
    let m: RunManifest =
        serde_json::from_str(text).map_err(|e| CliError::input(format!("config manifest: {e}")))?;
    if m.command != command {
        return Err(CliError::input(format!(
            "manifest is for `{}`, not `{command}`",
            m.command
        )));
    }
    Ok(m.parameters
        .into_iter()
        .map(|(k, v)| {
            let v = match v {
                Value::String(s) => s,
                other => other.to_string(),
            };
            (normalize(&k), v)
        })
        .collect())
}

impl Resolver {
    pub fn new(command: &'static str, config: Option<&Path>) -> Result<Self, CliError> {
        let file = match config {
            None => BTreeMap::new(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                if text.trim_start().starts_with('{') {
                    parse_manifest(&text, command)?
                } else {
                    parse_flat(&text)?
                }
            }
        };
        Ok(Self {
            command,
            file,
            resolved: BTreeMap::new(),
            started: Instant::now(),
        })
    }

    /// Flag value if given, else the config-file value, else `default`.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Serialize,
        T::Err: Display,
    {
        let value = match (flag, self.file.get(key)) {
            (Some(v), _) => v,
            (None, Some(text)) => text
                .parse()
                .map_err(|e| CliError::input(format!("config key `{key}` = `{text}`: {e}")))?,
            (None, None) => default,
        };
        self.record(key, &value);
        Ok(value)
    }

    pub fn get_opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Serialize,
        T::Err: Display,
    {
        let value = match (flag, self.file.get(key)) {
            (Some(v), _) => Some(v),
            (None, Some(text)) => Some(
                text.parse()
                    .map_err(|e| CliError::input(format!("config key `{key}` = `{text}`: {e}")))?,
            ),
            (None, None) => None,
        };
        if let Some(v) = &value {
            self.record(key, v);
        }
        Ok(value)
    }

    fn record<T: Serialize>(&mut self, key: &str, value: &T) {
        let v = serde_json::to_value(value).expect("parameter values serialize");
        self.resolved.insert(key.to_string(), v);
    }

    /// Rejects config keys that the command never asked for.
    pub fn check_unused(&self) -> Result<(), CliError> {
        let unused: Vec<_> = self
            .file
            .keys()
            .filter(|k| !self.resolved.contains_key(*k))
            .collect();
        if unused.is_empty() {
            Ok(())
        } else {
            Err(CliError::input(format!(
                "unknown config keys for `{}`: {unused:?}",
                self.command
            )))
        }
    }

    pub fn manifest(&self, outputs: Vec<PathBuf>) -> RunManifest {
        RunManifest {
            command: self.command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.resolved.get("seed").and_then(Value::as_u64),
            parameters: self.resolved.clone(),
            outputs,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}
