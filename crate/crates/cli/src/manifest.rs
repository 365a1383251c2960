//! Run manifest written alongside every output file: the resolved config,
//! seed and output checksums needed to reproduce a run byte for byte
//! (timing columns excepted).

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::configs::CliError;

#[derive(Debug, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: Value,
    pub outputs: Vec<OutputEntry>,
}

impl RunManifest {
    pub fn new(command: &'static str, seed: Option<u64>, config: Value) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            outputs: Vec::new(),
        }
    }

    /// Write one data file under `dir` and record its checksum.
    pub fn write_output(
        &mut self,
        dir: &Path,
        name: &str,
        contents: &[u8],
    ) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), contents)?;
        let mut hasher = Sha256::new();
        hasher.update(contents);
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        self.outputs.push(OutputEntry {
            path: name.to_string(),
            sha256: hex,
        });
        Ok(())
    }

    pub fn finish(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        let text =
            serde_json::to_string_pretty(self).map_err(|e| CliError::runtime(e.to_string()))?;
        fs::write(dir.join("manifest.json"), text)?;
        Ok(())
    }
}
