//! Run manifests and the two on-disk formats. Every artifact carries the
//! manifest that produced it: JSON embeds it verbatim, CSV prefixes the
//! table with '#' metadata lines.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            params: BTreeMap::new(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

/// Full-precision float cell; 17 significant digits survive a round trip.
pub fn cell(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes '#' metadata, a header row, and the data rows. The timestamp is
/// deliberately left out of the metadata: reruns from the same manifest
/// must produce byte-identical files.
pub fn write_csv(
    path: &Path,
    manifest: &RunManifest,
    header: &[&str],
    rows: &[Vec<String>],
) -> anyhow::Result<()> {
    let mut file =
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    writeln!(file, "# command = {}", manifest.command)?;
    for (k, v) in &manifest.params {
        writeln!(file, "# {k} = {v}")?;
    }
    writeln!(file, "# seed = {}", manifest.seed)?;
    writeln!(file, "# tool_version = {}", manifest.tool_version)?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, payload: &T) -> anyhow::Result<()> {
    let mut file =
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    serde_json::to_writer_pretty(&mut file, payload)?;
    writeln!(file)?;
    Ok(())
}
