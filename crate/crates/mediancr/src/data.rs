//! Plain-text data files: one decimal number per line, `#` comments and
//! blank lines ignored.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use mediancr_core::rng::RngStream;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {text:?} is not a finite decimal number")]
    Parse { line: usize, text: String },
    #[error("no data values found")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    pub path: PathBuf,
    pub values: Vec<f64>,
}

impl DataFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let path = path.as_ref().to_path_buf();
        let text = std::fs::read_to_string(&path).map_err(|source| DataError::Io { path: path.clone(), source })?;
        Ok(Self { values: parse_values(&text)?, path })
    }
}

pub fn parse_values(text: &str) -> Result<Vec<f64>, DataError> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            _ => return Err(DataError::Parse { line: i + 1, text: line.to_string() }),
        }
    }
    if values.is_empty() {
        return Err(DataError::Empty);
    }
    Ok(values)
}

/// Adds `uniform(-half_width, half_width)` noise to every value that occurs
/// more than once, in input order. Untied values are returned unchanged.
pub fn jitter_ties(values: &[f64], half_width: f64, rng: &mut RngStream) -> Vec<f64> {
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for v in values {
        *counts.entry(v.to_bits()).or_default() += 1;
    }
    values
        .iter()
        .map(|&v| {
            if counts[&v.to_bits()] > 1 {
                v + half_width * (2.0 * rng.uniform() - 1.0)
            } else {
                v
            }
        })
        .collect()
}
