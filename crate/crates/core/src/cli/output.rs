use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{OutputDigest, SCHEMA_VERSION};
use crate::error::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub(super) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_bytes(dir: &Path, name: &str, bytes: &[u8]) -> Result<OutputDigest> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(io_err(&path))?;
    Ok(OutputDigest {
        file: name.to_string(),
        sha256: sha256_hex(bytes),
        bytes: bytes.len() as u64,
    })
}

pub(super) fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<OutputDigest> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| Error::Parse {
        path: dir.join(name).display().to_string(),
        source,
    })?;
    bytes.push(b'\n');
    write_bytes(dir, name, &bytes)
}

/// Rows of text cells; `schema_version` is prepended to every record.
pub(super) struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<OutputDigest> {
        let path = dir.join(name);
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io {
            path: path.display().to_string(),
            source: std::io::Error::other(e.to_string()),
        };
        let version = SCHEMA_VERSION.to_string();
        w.write_record(std::iter::once("schema_version").chain(self.header.iter().copied()))
            .map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(std::iter::once(version.as_str()).chain(row.iter().map(String::as_str)))
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: std::io::Error::other(e.to_string()),
        })?;
        write_bytes(dir, name, &bytes)
    }
}

/// Shortest round-trip decimal; `inf`, `-inf`, `NaN` for non-finite values.
pub(super) fn num(x: f64) -> String {
    format!("{x}")
}

pub(super) fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
