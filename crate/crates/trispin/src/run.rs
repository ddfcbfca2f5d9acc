//! Output directory of a single invocation.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formats::write_csv;

/// Collects the files of one run: `config.json`, data files, `manifest.json`
/// and `timings.json`.
///
/// Everything except `timings.json` depends only on the configuration, so
/// repeated runs produce byte-identical files.
pub struct RunDir {
    path: PathBuf,
    files: Vec<String>,
    started: Instant,
    timings: Vec<(String, f64)>,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    package: &'static str,
    version: &'static str,
    subcommand: &'a str,
    seed: u64,
    config: &'a C,
    files: &'a [String],
}

impl RunDir {
    pub fn create(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        fs::create_dir_all(&path).map_err(|e| Error::io(&path, e))?;
        Ok(Self {
            path,
            files: Vec::new(),
            started: Instant::now(),
            timings: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn open(&mut self, name: &str) -> Result<BufWriter<File>> {
        let p = self.path.join(name);
        let f = File::create(&p).map_err(|e| Error::io(&p, e))?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.into());
        }
        Ok(BufWriter::new(f))
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let p = self.path.join(name);
        let mut w = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(p, e))
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let w = self.open(name)?;
        write_csv(w, header, rows)
    }

    /// Records the wall time since the previous mark under `label`.
    pub fn mark(&mut self, label: &str) {
        let total: f64 = self.timings.iter().map(|t| t.1).sum();
        self.timings
            .push((label.into(), self.started.elapsed().as_secs_f64() - total));
    }

    /// Writes `config.json`, `manifest.json` and `timings.json`.
    pub fn finish<C: Serialize>(mut self, subcommand: &str, seed: u64, config: &C) -> Result<PathBuf> {
        self.write_json("config.json", config)?;
        let mut files = self.files.clone();
        files.sort();
        let manifest = Manifest {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            seed,
            config,
            files: &files,
        };
        self.write_json("manifest.json", &manifest)?;
        let timings: serde_json::Map<String, serde_json::Value> = self
            .timings
            .iter()
            .map(|(k, v)| (k.clone(), (*v).into()))
            .chain([("total_seconds".to_string(), self.started.elapsed().as_secs_f64().into())])
            .collect();
        self.write_json("timings.json", &timings)?;
        Ok(self.path)
    }
}
