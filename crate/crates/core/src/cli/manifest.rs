use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

/// Record of one run: enough to repeat it and to notice changed inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: RunConfig,
    pub inputs: BTreeMap<String, InputFile>,
    pub seed: u64,
    pub version: String,
    pub wall_time_seconds: f64,
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(self).expect("manifest serialises");
        std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Inputs whose current digest differs from the recorded one.
    pub fn drifted_inputs(&self) -> Result<Vec<String>> {
        let mut drifted = Vec::new();
        for (role, input) in &self.inputs {
            let now = match file_digest(&input.path) {
                Ok(d) => d,
                Err(Error::Io { .. }) => "missing".into(),
                Err(e) => return Err(e),
            };
            if now != input.sha256 {
                drifted.push(format!("{role} ({})", input.path.display()));
            }
        }
        Ok(drifted)
    }
}
