use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    /// Path relative to the manifest's base directory.
    pub path: String,
    pub sha256: String,
}

/// Record of one CLI run and the files it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Effective configuration after flags were applied.
    pub config: Value,
    pub versions: BTreeMap<String, String>,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Only recorded with `--timing`.
    pub wall_clock_s: Option<f64>,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn new(command: &str, config: Value, seed: u64, threads: Option<usize>) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert(
            env!("CARGO_PKG_NAME").to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        );
        Self {
            command: command.to_string(),
            config,
            versions,
            seed,
            threads,
            wall_clock_s: None,
            outputs: Vec::new(),
        }
    }

    /// Digests `files`, recording their paths relative to `base` when possible.
    pub fn record_outputs(&mut self, base: &Path, files: &[PathBuf]) -> Result<()> {
        for f in files {
            let rel = f.strip_prefix(base).unwrap_or(f);
            self.outputs.push(OutputDigest {
                path: rel.display().to_string(),
                sha256: sha256_file(f)?,
            });
        }
        Ok(())
    }

    /// Every listed output exists under `base` and matches its digest.
    pub fn verify(&self, base: &Path) -> Result<()> {
        for o in &self.outputs {
            let path = base.join(&o.path);
            let actual = sha256_file(&path)?;
            if actual != o.sha256 {
                return Err(Error::invalid(format!("digest mismatch for {}", path.display())));
            }
        }
        Ok(())
    }
}
