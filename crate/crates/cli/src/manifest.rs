//! Run manifests and failure-safe output handling.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::{Deserialize, Serialize};

/// Record of one subcommand run, written next to its primary output.
/// Re-running the subcommand with the recorded config and seed reproduces
/// the outputs bit-exactly; `wall_time_s` is the only field that varies.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub config: serde_json::Value,
    pub wall_time_s: f64,
}

/// Builder that tracks created files and deletes them unless committed, so
/// a failing run leaves no partial outputs behind.
pub struct RunGuard {
    subcommand: String,
    seed: Option<u64>,
    inputs: Vec<String>,
    outputs: Vec<PathBuf>,
    started: Instant,
    committed: bool,
}

impl RunGuard {
    pub fn new(subcommand: &str, seed: Option<u64>) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
            committed: false,
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }

    /// Registers an output for cleanup on failure. Sidecars written by the
    /// MOT writer are registered alongside their primary file.
    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn output_with_sidecar(&mut self, path: &Path) {
        self.output(path);
        self.outputs.push(shoaltrack_core::mot::seqinfo_path(path));
    }

    /// Writes the manifest next to the first registered output and commits.
    pub fn finish<C: Serialize>(mut self, config: &C) -> anyhow::Result<PathBuf> {
        let primary = self.outputs.first().cloned().context("run produced no outputs")?;
        let manifest_path = manifest_path(&primary);
        let manifest = RunManifest {
            tool: "shoaltrack".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: self.subcommand.clone(),
            seed: self.seed,
            inputs: self.inputs.clone(),
            outputs: self.outputs.iter().map(|p| p.display().to_string()).collect(),
            config: serde_json::to_value(config)?,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(&manifest_path, text)
            .with_context(|| format!("writing manifest {}", manifest_path.display()))?;
        self.committed = true;
        Ok(manifest_path)
    }
}

impl Drop for RunGuard {
    fn drop(&mut self) {
        if !self.committed {
            for path in &self.outputs {
                let _ = std::fs::remove_file(path);
            }
        }
    }
}

/// Manifest path for a primary output: `dir/x.txt` maps to
/// `dir/x.manifest.json`.
pub fn manifest_path(primary_output: &Path) -> PathBuf {
    let stem = primary_output.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    primary_output.with_file_name(format!("{stem}.manifest.json"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_runs_remove_partial_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("partial.txt");
        {
            let mut guard = RunGuard::new("synth", None);
            std::fs::write(&out, "half-written").unwrap();
            guard.output(&out);
            // dropped without finish(): simulated failure
        }
        assert!(!out.exists());
    }

    #[test]
    fn committed_runs_keep_outputs_and_write_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("done.txt");
        let mut guard = RunGuard::new("synth", Some(5));
        std::fs::write(&out, "content").unwrap();
        guard.output(&out);
        let manifest = guard.finish(&serde_json::json!({"k": 1})).unwrap();
        assert!(out.exists());
        let parsed: RunManifest = serde_json::from_str(&std::fs::read_to_string(manifest).unwrap()).unwrap();
        assert_eq!(parsed.subcommand, "synth");
        assert_eq!(parsed.seed, Some(5));
        assert_eq!(parsed.outputs, vec![out.display().to_string()]);
    }
}
