use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// First eight bytes (little-endian) of the SHA-256 of a configuration
/// snapshot; stamped into every binary output.
pub fn config_hash(snapshot: &str) -> u64 {
    let digest = Sha256::digest(snapshot.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Record of one command run: enough to reproduce it and to locate its
/// outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    /// Full configuration text the outputs depend on.
    pub config: String,
    pub config_hash: String,
    pub rng_seed: Option<u64>,
    pub versions: BTreeMap<String, String>,
    pub threads: usize,
    pub outputs: Vec<PathBuf>,
    pub frames: usize,
    /// Mean wall-clock milliseconds per frame for each stage.
    pub timings_ms_per_frame: BTreeMap<String, f64>,
    pub total_seconds: f64,
}

impl Manifest {
    pub fn new(command: &str, config: String) -> Self {
        let hash = config_hash(&config);
        let versions = [
            ("satt-cli", env!("CARGO_PKG_VERSION")),
            ("satt-core", satt_core::VERSION),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
        Self {
            command: command.to_string(),
            inputs: Vec::new(),
            config,
            config_hash: format!("{hash:016x}"),
            rng_seed: None,
            versions,
            threads: rayon::current_num_threads(),
            outputs: Vec::new(),
            frames: 0,
            timings_ms_per_frame: BTreeMap::new(),
            total_seconds: 0.0,
        }
    }

    pub fn hash(&self) -> u64 {
        config_hash(&self.config)
    }

    /// Adds `ms` to a stage total; [`Manifest::finish_timings`] divides by
    /// the frame count.
    pub fn add_time(&mut self, stage: &str, ms: f64) {
        *self.timings_ms_per_frame.entry(stage.to_string()).or_default() += ms;
    }

    pub fn finish_timings(&mut self) {
        let n = self.frames.max(1) as f64;
        for v in self.timings_ms_per_frame.values_mut() {
            *v /= n;
        }
    }

    /// Writes the manifest as JSON and lists it among its own outputs.
    pub fn write(&mut self, path: &Path) -> anyhow::Result<()> {
        self.outputs.push(path.to_path_buf());
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| satt_core::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Ok(())
    }
}
