//! Line-delimited artifact files shared between pipeline stages.
//!
//! Every intermediate artifact is UTF-8 JSON-lines so stages stay
//! independently inspectable and diffable. Writes are deterministic:
//! rerunning a stage on unchanged inputs rewrites byte-identical files.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::EvalMetrics;
use crate::yake::Keyword;
use crate::ProposalId;

/// Extracted keywords for one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordRecord {
    pub proposal_id: ProposalId,
    pub keywords: Vec<Keyword>,
}

/// Per-document evaluation row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerDocumentMetrics {
    pub proposal_id: ProposalId,
    #[serde(flatten)]
    pub metrics: EvalMetrics,
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut out = Vec::new();
    for item in items {
        let line = serde_json::to_string(item).map_err(|e| Error::Config(e.to_string()))?;
        out.extend_from_slice(line.as_bytes());
        out.push(b'\n');
    }
    write_bytes(path, &out)
}

/// Read a JSON-lines artifact; a missing file is a missing upstream
/// artifact, not an IO error.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut items = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            path: path.to_path_buf(),
            line: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(items)
}

pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut body = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    body.push('\n');
    write_bytes(path, body.as_bytes())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    let mut file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write a small CSV table with deterministic quoting.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer.write_record(header).map_err(|e| Error::Config(e.to_string()))?;
    for row in rows {
        writer.write_record(row).map_err(|e| Error::Config(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    write_bytes(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.jsonl");
        let records = vec![KeywordRecord {
            proposal_id: 7,
            keywords: vec![Keyword {
                surface: "soil".into(),
                stemmed: "soil".into(),
                score: 0.25,
                rank: 1,
            }],
        }];
        write_jsonl(&path, &records).unwrap();
        let back: Vec<KeywordRecord> = read_jsonl(&path).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn missing_artifact_error() {
        let err = read_jsonl::<KeywordRecord>(Path::new("/nonexistent/x.jsonl")).unwrap_err();
        assert!(matches!(err, Error::MissingArtifact(_)));
    }

    #[test]
    fn writes_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let rows = vec![vec!["a,b".to_string(), "0.5".to_string()]];
        write_csv(&path, &["label", "value"], &rows).unwrap();
        let first = std::fs::read(&path).unwrap();
        write_csv(&path, &["label", "value"], &rows).unwrap();
        assert_eq!(first, std::fs::read(&path).unwrap());
    }
}
