//! Run manifests and atomic artifact writing.
//!
//! Every command that writes artifacts also writes a `.manifest.json`
//! sidecar carrying the exact command line, the fully resolved
//! configuration (defaults included), the seed, the tool version, and
//! SHA-256 digests of each input and output file. Re-running with an
//! identical manifest reproduces the artifacts byte for byte; the
//! manifest itself additionally records wall time.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: &'static str,
    pub seed: u64,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub wall_ms: u64,
}

impl RunManifest {
    pub fn new(seed: u64, config: serde_json::Value) -> Self {
        let command = std::env::args().collect::<Vec<_>>().join(" ");
        Self {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            wall_ms: 0,
        }
    }

    pub fn record_input(&mut self, path: &Path) -> std::io::Result<()> {
        let bytes = std::fs::read(path)?;
        self.inputs
            .insert(path.display().to_string(), hex_digest(&bytes));
        Ok(())
    }

    pub fn record_output(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs
            .insert(path.display().to_string(), hex_digest(bytes));
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Write-to-temp + atomic rename: no partial files on failure.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp: PathBuf = {
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(".tmp");
        path.with_file_name(name)
    };
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
