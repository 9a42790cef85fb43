//! Reproducibility sidecar written next to every file the CLI produces:
//! the full command line, parsed parameters, seed, crate version, and a
//! timestamp. Re-running the recorded command regenerates the file
//! byte for byte (timestamp aside).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    /// The argv that produced the output, joined verbatim.
    pub command: String,
    /// Parsed parameter values, keyed by flag name.
    pub parameters: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub version: String,
    /// Unix seconds at write time.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: String, parameters: BTreeMap<String, String>, seed: Option<u64>) -> Self {
        RunManifest {
            command,
            parameters,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// `<output>.manifest.json` for the given output path.
    pub fn sidecar_path(output: &Path) -> PathBuf {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        output.with_file_name(name)
    }

    /// Writes the manifest next to `output`.
    pub fn write_sidecar(&self, output: &Path) -> std::io::Result<PathBuf> {
        let path = Self::sidecar_path(output);
        fs::write(&path, serde_json::to_string_pretty(self).expect("serializable") + "\n")?;
        Ok(path)
    }
}
