//! CSV files and the run manifest.

use crate::config::Config;
use crate::Failure;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Shortest decimal string that parses back to the same `f64`.
pub fn number(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Config,
    pub master_seed: u64,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub tolerances: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
    pub outputs: Vec<OutputFile>,
    /// SHA-256 over the `path sha256` lines of all outputs, in order.
    pub digest: String,
}

/// Collects output files and warnings for one run.
pub struct Run {
    dir: PathBuf,
    command: String,
    config: Config,
    started: String,
    pub warnings: Vec<String>,
    pub tolerances: BTreeMap<String, f64>,
    pub summary: Option<serde_json::Value>,
    outputs: Vec<OutputFile>,
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl Run {
    pub fn new(dir: &Path, command: &str, config: &Config) -> Result<Self, Failure> {
        std::fs::create_dir_all(dir).map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))?;
        let mut tolerances = BTreeMap::new();
        tolerances.insert("analytic_quadrature_rel".into(), doorway::analytic::FORMULA_REL_TOL);
        tolerances.insert("reference_quadrature_rel".into(), doorway::analytic::REFERENCE_REL_TOL);
        tolerances.insert("error_estimate_warning".into(), config.tol);
        Ok(Run {
            dir: dir.to_path_buf(),
            command: command.into(),
            config: config.clone(),
            started: timestamp(),
            warnings: Vec::new(),
            tolerances,
            summary: None,
            outputs: Vec::new(),
        })
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        if !self.warnings.contains(&msg) {
            self.warnings.push(msg);
        }
    }

    /// Warns when a quadrature error estimate exceeds the configured tolerance.
    pub fn check_error(&mut self, what: &str, err_est: f64) {
        if err_est > self.config.tol {
            self.warn(format!("{what}: error estimate {err_est:e} exceeds tol {:e}", self.config.tol));
        }
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), Failure> {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            let cells: Vec<String> = row.iter().map(|&x| number(x)).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        let path = self.dir.join(name);
        std::fs::write(&path, &text).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push(OutputFile {
            path: name.into(),
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
            bytes: text.len() as u64,
            rows: rows.len(),
        });
        Ok(())
    }

    /// Writes `manifest.json` and returns the manifest.
    pub fn finish(self) -> Result<RunManifest, Failure> {
        let mut h = Sha256::new();
        for f in &self.outputs {
            h.update(format!("{} {}\n", f.path, f.sha256));
        }
        let manifest = RunManifest {
            command: self.command,
            master_seed: self.config.seed,
            config: self.config,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started: self.started,
            finished: timestamp(),
            tolerances: self.tolerances,
            warnings: self.warnings,
            summary: self.summary,
            outputs: self.outputs,
            digest: hex::encode(h.finalize()),
        };
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::io(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
        Ok(manifest)
    }
}
