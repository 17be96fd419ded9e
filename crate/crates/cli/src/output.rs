//! Output paths and file writers shared by the subcommands.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::Failure;

pub const TOOL: &str = "upconv";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Resolves output paths; relative paths land in the output directory.
#[derive(Clone, Debug, Default)]
pub struct OutDir {
    root: Option<PathBuf>,
}

impl OutDir {
    pub fn new(root: Option<PathBuf>) -> Self {
        Self { root }
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.root {
            Some(root) if path.is_relative() => root.join(path),
            _ => path.to_path_buf(),
        }
    }

    /// Resolves and makes sure the parent directory exists.
    pub fn prepare(&self, path: &Path) -> Result<PathBuf, Failure> {
        let p = self.resolve(path);
        if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        Ok(p)
    }
}

/// `name.json` → `name.<suffix>`
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

/// `ch1.ttag` → `ch1.ttag.meta.json`
pub fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}

pub fn write_json<C: Serialize, R: Serialize>(path: &Path, command: &str, config: &C, report: &R) -> Result<(), Failure> {
    let doc = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "config": config,
        "report": report,
    });
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// CSV with `#` header lines: tool, command, the config as compact JSON,
/// then `key: value` metadata, the column names and the rows.
pub struct CsvTable<'a> {
    pub command: &'a str,
    pub config: serde_json::Value,
    pub meta: Vec<(String, String)>,
    pub columns: &'a [&'a str],
    pub rows: Vec<Vec<String>>,
}

impl CsvTable<'_> {
    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "# {TOOL} {} {VERSION}", self.command)?;
        writeln!(w, "# config: {}", serde_json::to_string(&self.config)?)?;
        for (k, v) in &self.meta {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn display(path: &Path) -> String {
    path.display().to_string()
}
