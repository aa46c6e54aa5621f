//! Run manifests and atomic output files.

use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance of one command invocation. Output paths are relative to the
/// manifest's directory so that moved output trees stay self-describing.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    /// RFC 3339; taken from `SOURCE_DATE_EPOCH` when set.
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            config,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = std::fs::read(path).map_err(CliError::io(path))?;
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    /// Writes `bytes` to `path` atomically and records it relative to
    /// `base`, the manifest's directory.
    pub fn write_output(&mut self, base: &Path, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        write_atomic(path, bytes)?;
        self.outputs.push(FileDigest {
            path: path.strip_prefix(base).unwrap_or(path).display().to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_vec_pretty(self).map_err(|e| CliError::Internal(e.to_string()))?;
        text.push(b'\n');
        write_atomic(path, &text)
    }
}

fn timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    now.to_rfc3339_opts(SecondsFormat::Secs, true)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(CliError::io(&dir))?;
    tmp.write_all(bytes).map_err(CliError::io(path))?;
    tmp.as_file().sync_all().map_err(CliError::io(path))?;
    tmp.persist(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

/// Manifest location for a single-file output: `<file>.manifest.json`.
pub fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}
