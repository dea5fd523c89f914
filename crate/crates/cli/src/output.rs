use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{CliError, ExperimentConfig};

/// Decimal with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated table with a header row and LF line endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[derive(Serialize)]
struct FileEntry {
    name: String,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    started: &'a str,
    finished: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exit_code: Option<i32>,
    config: &'a ExperimentConfig,
    files: Vec<FileEntry>,
}

/// `runs/<timestamp>-<seed>/`: artifacts first, `manifest.json` last.
pub struct RunDir {
    path: PathBuf,
    command: String,
    seed: u64,
    started: String,
    files: Vec<(String, Vec<u8>)>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunDir {
    pub fn create(root: &Path, command: &str, seed: u64) -> Result<Self, CliError> {
        let stamp = Utc::now().format("%Y%m%dT%H%M%S%.3fZ");
        let base = format!("{stamp}-{seed}");
        let mut path = root.join(&base);
        let mut n = 1;
        while path.exists() {
            path = root.join(format!("{base}-{n}"));
            n += 1;
        }
        fs::create_dir_all(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(Self { path, command: command.to_string(), seed, started: now(), files: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn write(&mut self, name: &str, contents: impl Into<Vec<u8>>) -> Result<(), CliError> {
        let bytes = contents.into();
        let p = self.path.join(name);
        fs::write(&p, &bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        self.write(name, s)
    }

    /// Writes the manifest with checksums of every artifact written so far.
    pub fn finish(self, config: &ExperimentConfig, failure: Option<&CliError>) -> Result<PathBuf, CliError> {
        let files = self
            .files
            .iter()
            .map(|(name, bytes)| FileEntry {
                name: name.clone(),
                bytes: bytes.len(),
                sha256: Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect(),
            })
            .collect();
        let error = failure.map(|e| e.to_string());
        let manifest = Manifest {
            tool: "affqetu",
            version: env!("CARGO_PKG_VERSION"),
            command: &self.command,
            seed: self.seed,
            started: &self.started,
            finished: now(),
            error: error.as_deref(),
            exit_code: failure.map(CliError::exit_code),
            config,
            files,
        };
        let mut s = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        let p = self.path.join("manifest.json");
        fs::write(&p, s).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        Ok(self.path)
    }
}
