//! Problem records, dataset loaders, the FOLIO gold filter and balanced
//! ProofWriter sampling.

mod folio;
mod proofwriter;
mod sample;

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::voting::Label;

pub use folio::{load_folio, parse_folio, validate_folio, FilterReason, FilterReport};
pub use proofwriter::{load_proofwriter, split_sentences};
pub use sample::{balanced_sample, MAX_DEPTH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "FOLIO-train")]
    FolioTrain,
    #[serde(rename = "FOLIO-val")]
    FolioVal,
    #[serde(rename = "ProofWriter-OWA")]
    ProofWriterOwa,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemRecord {
    pub id: String,
    pub premises_nl: Vec<String>,
    pub conclusion_nl: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub premises_fol: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conclusion_fol: Option<String>,
    pub gold_label: Label,
    /// Shortest proof depth; ProofWriter only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u8>,
    pub source: Source,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed { path: PathBuf, line: usize, message: String },
    #[error("{0}: no .jsonl files found")]
    EmptyDirectory(PathBuf),
    #[error("cell (depth {depth}, {label}) has {available} records, {requested} requested")]
    InsufficientCell { depth: u8, label: Label, available: usize, requested: usize },
}

impl DatasetError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        DatasetError::Io { path: path.to_owned(), source }
    }
}

/// Reads the normalized record format, one JSON object per line.
pub fn read_records(path: &Path) -> Result<Vec<ProblemRecord>, DatasetError> {
    let file = File::open(path).map_err(|e| DatasetError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| DatasetError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| DatasetError::Malformed {
            path: path.to_owned(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_records(path: &Path, records: &[ProblemRecord]) -> Result<(), DatasetError> {
    let mut file = File::create(path).map_err(|e| DatasetError::io(path, e))?;
    let mut buf = String::new();
    for r in records {
        buf.push_str(&serde_json::to_string(r).expect("records serialize"));
        buf.push('\n');
    }
    file.write_all(buf.as_bytes()).map_err(|e| DatasetError::io(path, e))
}
