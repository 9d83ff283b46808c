//! In-memory result tables and their CSV form.
//!
//! Every file starts with one comment line,
//! `# coex <version> config-hash=<sha256 hex>`, followed by a header row.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric cell, by column name.
    pub fn number(&self, row: usize, name: &str) -> Result<f64> {
        let col = self
            .column(name)
            .ok_or_else(|| CliError::Config(format!("missing column {name}")))?;
        let cell = &self.rows[row][col];
        cell.parse()
            .map_err(|_| CliError::Config(format!("row {}: {name} = {cell:?} is not a number", row + 1)))
    }

    pub fn to_csv(&self, config_hash: &str) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        writeln!(out, "# coex {VERSION} config-hash={config_hash}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
    }

    pub fn from_csv(bytes: &[u8]) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(bytes);
        let header = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(str::to_string).collect());
        }
        Ok(Self { header, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_csv(&bytes)
    }
}

/// Writes `bytes` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Config(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

/// SHA-256 of the JSON form of everything that determines an output.
pub fn config_hash(resolved: &impl Serialize) -> Result<String> {
    let json = serde_json::to_vec(resolved).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(&json)))
}

/// Shortest representation that parses back to the same value.
pub fn num(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_comment() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        t.push(vec![num(0.1 + 0.2), num(1e-20)]);
        let bytes = t.to_csv("abc").unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with(&format!("# coex {VERSION} config-hash=abc\na,b\n")));
        let back = Table::from_csv(&bytes).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.number(1, "a").unwrap(), 0.1 + 0.2);
        assert!(back.number(0, "b").is_err());
        assert!(back.number(0, "c").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = config_hash(&serde_json::json!({"x": 1})).unwrap();
        let b = config_hash(&serde_json::json!({"x": 2})).unwrap();
        assert_eq!(a.len(), 64);
        assert_ne!(a, b);
        assert_eq!(a, config_hash(&serde_json::json!({"x": 1})).unwrap());
    }
}
