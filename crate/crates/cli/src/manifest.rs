//! Run manifest: tool version, config echo, grid metadata, per-phase
//! wall-clock timings and digests of every output file. Everything except
//! the timings is deterministic for a fixed config and seed.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub threads: usize,
    pub config_echo: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<serde_json::Value>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timings_ms: BTreeMap<String, u64>,
    /// file name -> sha256 of its bytes
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, threads: usize, config_echo: serde_json::Value) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            threads,
            config_echo,
            grid: None,
            status: "ok".to_string(),
            error: None,
            timings_ms: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn set_grid(&mut self, grid: &biwave_core::GridSpec) {
        self.grid = Some(serde_json::json!({
            "n": grid.n(),
            "points_per_axis": grid.points_per_axis(),
            "half_length": grid.half_length(),
        }));
    }

    pub fn set_error(&mut self, class: &str, message: &str) {
        self.status = "error".to_string();
        self.error = Some(format!("{class}: {message}"));
    }

    pub fn record_output(&mut self, dir: &Path, name: &str) -> std::io::Result<()> {
        let bytes = std::fs::read(dir.join(name))?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.outputs.insert(name.to_string(), hex);
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(dir.join("manifest.json"), text + "\n")
    }

    /// Records the wall-clock time of a phase that began at `start`.
    pub fn timing(&mut self, name: &str, start: Instant) {
        self.timings_ms.insert(name.to_string(), start.elapsed().as_millis() as u64);
    }
}
