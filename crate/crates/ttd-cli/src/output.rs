//! CSV and JSON emitters. All floats print through Rust's shortest
//! round-trip formatting so re-ingesting a file reproduces values bit for
//! bit; dB conversion happens only at emit time.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

/// Linear power to dB with a -300 dB floor for exact nulls.
pub fn db(linear: f64) -> f64 {
    if linear <= 1e-30 {
        -300.0
    } else {
        10.0 * linear.log10()
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub struct CsvWriter {
    out: std::io::BufWriter<fs::File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &str) -> Result<Self> {
        let file =
            fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut out = std::io::BufWriter::new(file);
        writeln!(out, "{header}")?;
        Ok(Self { out })
    }

    pub fn row(&mut self, fields: std::fmt::Arguments<'_>) -> Result<()> {
        writeln!(self.out, "{fields}")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}
