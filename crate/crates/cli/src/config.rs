//! JSON config files. Flags win over file values.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};
use crate::parse::CountsValue;

pub const OUT_DIR_ENV: &str = "URN_OUT_DIR";

/// Keys every config file may carry besides the command's own.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommonFile {
    pub name: Option<String>,
    pub out_dir: Option<PathBuf>,
    /// Guards against running a config under the wrong subcommand.
    pub command: Option<String>,
}

/// Split a config into the shared keys and the command-specific rest.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<(T, CommonFile)> {
    let Some(path) = path else {
        return Ok((T::default(), CommonFile::default()));
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::Usage(format!(
            "{}: expected a JSON object",
            path.display()
        )));
    };
    let mut common = Map::new();
    for key in ["name", "out_dir", "command"] {
        if let Some(v) = map.remove(key) {
            common.insert(key.into(), v);
        }
    }
    let bad = |e: serde_json::Error| CliError::Usage(format!("{}: {e}", path.display()));
    let common = serde_json::from_value(Value::Object(common)).map_err(bad)?;
    let specific = serde_json::from_value(Value::Object(map)).map_err(bad)?;
    Ok((specific, common))
}

/// Resolved output location for one run.
pub struct Target {
    pub dir: PathBuf,
    pub name: String,
}

pub fn target(
    flag_dir: Option<PathBuf>,
    flag_name: Option<String>,
    file: CommonFile,
    command: &str,
) -> CliResult<Target> {
    if let Some(c) = file.command.as_deref().filter(|c| *c != command) {
        return Err(CliError::Usage(format!(
            "config is for `{c}`, not `{command}`"
        )));
    }
    let dir = flag_dir
        .or(file.out_dir)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let name = flag_name
        .or(file.name)
        .unwrap_or_else(|| command.to_string());
    Ok(Target { dir, name })
}

pub fn require<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing required argument --{flag}")))
}

/// A single count from a config value.
pub fn one_count(value: Option<CountsValue>, key: &str) -> CliResult<Option<u64>> {
    value
        .map(|v| {
            match v
                .resolve()
                .map_err(|e| CliError::Usage(format!("{key}: {e}")))?[..]
            {
                [n] => Ok(n),
                _ => Err(CliError::Usage(format!("{key}: expected a single count"))),
            }
        })
        .transpose()
}

pub fn count_list(value: Option<CountsValue>, key: &str) -> CliResult<Option<Vec<u64>>> {
    value
        .map(|v| {
            v.resolve()
                .map_err(|e| CliError::Usage(format!("{key}: {e}")))
        })
        .transpose()
}
