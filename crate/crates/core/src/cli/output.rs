//! Result envelope and CSV/JSON writers.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub package: String,
    pub version: String,
    /// SHA-256 of the constants table and species presets.
    pub constants_hash: String,
}

impl Provenance {
    pub fn current() -> Self {
        Provenance {
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            constants_hash: crate::constants::table_hash(),
        }
    }
}

/// Everything a command produces: the echoed configuration, the payload and
/// where it came from. No timestamps, so identical runs are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub command: String,
    pub config: Value,
    pub data: Value,
    pub provenance: Provenance,
}

/// Flat table for CSV output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(row.into_iter().map(|s| s.to_string()).collect());
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Float rendered for CSV: 15 significant digits, scientific notation
/// outside [1e-4, 1e16). JSON output keeps full precision.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let y: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    if (1e-4..1e16).contains(&y.abs()) { y.to_string() } else { format!("{y:e}") }
}

/// Optional float as a CSV cell.
pub fn cell(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_text(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_cells() {
        assert_eq!(num(59.99999999999999), "60");
        assert_eq!(num(1.4617290858056197e-14), "1.46172908580562e-14");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(-4.5e20), "-4.5e20");
        assert_eq!(cell(None), "");
    }
}
