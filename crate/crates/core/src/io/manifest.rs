//! Run manifests: what was run, with which configuration and seeds, and a
//! SHA-256 digest of every file produced.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the manifest's directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Fully resolved configuration (defaults filled in, seed overrides
    /// applied) as TOML text; feeding it back reproduces the artifacts.
    pub config: String,
    pub seeds: Vec<(String, u64)>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub artifacts: Vec<Artifact>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn unix_ms_now() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

impl RunManifest {
    pub fn new(command: &str, config: String, seeds: Vec<(String, u64)>) -> Self {
        Self {
            tool: "hosync".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            seeds,
            started_unix_ms: unix_ms_now(),
            finished_unix_ms: 0,
            artifacts: Vec::new(),
        }
    }

    /// Hashes `dir/rel` and records it.
    pub fn add_artifact(&mut self, dir: &Path, rel: &str) -> Result<()> {
        let data = std::fs::read(dir.join(rel)).map_err(|e| Error::Io(format!("{rel}: {e}")))?;
        self.artifacts.push(Artifact {
            path: rel.to_string(),
            bytes: data.len() as u64,
            sha256: sha256_hex(&data),
        });
        Ok(())
    }

    /// Recomputes every digest under `dir`; returns the paths that differ.
    pub fn verify(&self, dir: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for a in &self.artifacts {
            let data = std::fs::read(dir.join(&a.path)).map_err(|e| Error::Io(format!("{}: {e}", a.path)))?;
            if sha256_hex(&data) != a.sha256 {
                bad.push(a.path.clone());
            }
        }
        Ok(bad)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn parse(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::parse(Some(e.line()), e.to_string()))
    }

    /// Stamps the finish time and writes `dir/manifest.json`.
    pub fn finish(mut self, dir: &Path) -> Result<Self> {
        self.finished_unix_ms = unix_ms_now();
        std::fs::write(dir.join(MANIFEST_FILE), self.to_json()?)?;
        Ok(self)
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let src = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&src)
    }
}
