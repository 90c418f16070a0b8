use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Everything needed to rerun a command and find what it wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Output directory plus the file stem shared by one run's files.
pub struct Outputs {
    dir: PathBuf,
    stem: String,
    written: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: &Path, stem: &str) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stem: stem.to_string(),
            written: Vec::new(),
        })
    }

    /// Write `<stem>.<suffix>`.
    pub fn write(&mut self, suffix: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.dir.join(format!("{}.{suffix}", self.stem));
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Write the manifest listing every file written so far.
    pub fn finish(
        self,
        command: &str,
        parameters: Value,
        seed: Option<u64>,
        started_at: String,
        notes: Vec<String>,
    ) -> CliResult<PathBuf> {
        let manifest = RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            parameters,
            seed,
            started_at,
            finished_at: now(),
            outputs: self.written,
            notes,
        };
        let path = self.dir.join(format!("{}.manifest.json", self.stem));
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
