//! JSON config files merged under command-line flags.

use enclosure::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Config keys holding file paths; relative values resolve against the config file's directory.
const PATH_KEYS: [&str; 5] = ["scene", "matrix", "out", "out_csv", "out_pgm"];

/// Keys shared by every subcommand.
pub const GLOBAL_KEYS: [&str; 2] = ["threads", "seed"];

/// Point given as `x1,x2` on the command line or `[x1, x2]` in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pair(pub [f64; 2]);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(format!("expected two comma-separated numbers, got {s:?}"));
        }
        let a = parts[0].parse::<f64>().map_err(|e| format!("{:?}: {e}", parts[0]))?;
        let b = parts[1].parse::<f64>().map_err(|e| format!("{:?}: {e}", parts[1]))?;
        Ok(Pair([a, b]))
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0[0], self.0[1])
    }
}

/// Config file contents, with relative paths already resolved.
pub fn load(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Format(format!("config {}: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(Error::Format(format!("config {} must hold a JSON object", path.display())));
    };
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    for key in PATH_KEYS {
        if let Some(Value::String(s)) = map.get(key) {
            let p = PathBuf::from(s);
            if p.is_relative() {
                map.insert(key.into(), Value::String(base.join(p).to_string_lossy().into_owned()));
            }
        }
    }
    Ok(map)
}

/// Command arguments with every flag given on the command line taking precedence over the file.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: &Map<String, Value>) -> Result<T> {
    let mut merged: Map<String, Value> =
        file.iter().filter(|(k, _)| !GLOBAL_KEYS.contains(&k.as_str())).map(|(k, v)| (k.clone(), v.clone())).collect();
    let Value::Object(given) = serde_json::to_value(flags).map_err(|e| Error::Format(e.to_string()))? else {
        unreachable!("argument records serialize to objects")
    };
    for (k, v) in given {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Error::Format(format!("config: {e}")))
}

/// A global option from the file when the flag is absent.
pub fn global<T: DeserializeOwned>(file: &Map<String, Value>, key: &str) -> Result<Option<T>> {
    file.get(key).map(|v| serde_json::from_value(v.clone()).map_err(|e| Error::Format(format!("config key {key}: {e}")))).transpose()
}
