//! Reproducibility record written next to the outputs of a run.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
/// Bumped whenever a CSV column layout changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

impl OutputDigest {
    pub fn of(file: impl Into<String>, content: &[u8]) -> Self {
        Self { file: file.into(), sha256: sha256_hex(content), bytes: content.len() as u64 }
    }
}

pub fn sha256_hex(content: &[u8]) -> String {
    hex::encode(Sha256::digest(content))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub experiment: Experiment,
    pub seed: u64,
    pub seconds: f64,
    pub outputs: Vec<OutputDigest>,
    /// Finer wall-clock split, e.g. per acceptance criterion.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub timings: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub version: String,
    pub csv_schema: u32,
    pub config: ExperimentConfig,
    pub tasks: Vec<TaskRecord>,
}

impl RunManifest {
    pub fn new(config: ExperimentConfig) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            csv_schema: CSV_SCHEMA_VERSION,
            config,
            tasks: Vec::new(),
        }
    }

    pub fn task(&self, e: Experiment) -> Option<&TaskRecord> {
        self.tasks.iter().find(|t| t.experiment == e)
    }

    pub fn upsert(&mut self, record: TaskRecord) {
        match self.tasks.iter_mut().find(|t| t.experiment == record.experiment) {
            Some(t) => *t = record,
            None => self.tasks.push(record),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Write through a temporary file so a crash never leaves half a manifest.
    pub fn save(&self, dir: &Path) -> Result<()> {
        let tmp = dir.join(".manifest.json.tmp");
        std::fs::write(&tmp, self.to_json()).map_err(|e| CliError::io(&tmp, e))?;
        let path = dir.join(MANIFEST_FILE);
        std::fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::Corrupt(format!("{}: {e}", path.display())))?;
        parse_manifest(&text)
    }
}

pub fn parse_manifest(text: &str) -> Result<RunManifest> {
    let m: RunManifest = serde_json::from_str(text).map_err(|e| CliError::Corrupt(format!("manifest: {e}")))?;
    m.config.validate().map_err(|e| CliError::Corrupt(format!("manifest: {e}")))?;
    for t in &m.tasks {
        for o in &t.outputs {
            if o.sha256.len() != 64 || !o.sha256.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(CliError::Corrupt(format!("manifest: bad digest for {}", o.file)));
            }
            if o.file.is_empty() || o.file.contains(['/', '\\']) || o.file.starts_with('.') {
                return Err(CliError::Corrupt(format!("manifest: bad file name \"{}\"", o.file)));
            }
        }
    }
    Ok(m)
}

/// Files of `record` all present in `dir` with the recorded digests.
pub fn outputs_intact(dir: &Path, record: &TaskRecord) -> bool {
    record.outputs.iter().all(|o| match std::fs::read(dir.join(&o.file)) {
        Ok(bytes) => sha256_hex(&bytes) == o.sha256,
        Err(_) => false,
    })
}
