//! Delimited-file loading and per-proposal text assembly.
//!
//! Proposal and publication files are UTF-8 comma-separated tables with a
//! header row (RFC 4180 quoting). Loaded records are immutable and safe for
//! concurrent read-only use; loading itself is single-threaded per file.

use std::collections::BTreeMap;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textprep::{self, CuratedTermList, Token};
use crate::ProposalId;

/// Semantic columns in their canonical assembly order.
pub const DEFAULT_SEMANTIC_FIELDS: [&str; 8] = [
    "Title",
    "Description",
    "Justification",
    "Community Interest",
    "Summary of Work",
    "Sample Preparation",
    "Utilization",
    "DOE Mission",
];

/// Default name of the integer ID column.
pub const DEFAULT_ID_COLUMN: &str = "Proposal ID";

/// Column mapping for proposal files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldMap {
    pub id_column: String,
    pub semantic_fields: Vec<String>,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap {
            id_column: DEFAULT_ID_COLUMN.to_string(),
            semantic_fields: DEFAULT_SEMANTIC_FIELDS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// One proposal row. `fields` preserves the source column order and keeps
/// non-semantic columns for provenance; only semantic fields ever enter the
/// assembled blob.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProposalRecord {
    pub proposal_id: ProposalId,
    pub fields: IndexMap<String, String>,
}

/// One publication row, linked to a proposal by integer ID.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub publication_id: String,
    pub proposal_id: ProposalId,
    pub title: Option<String>,
}

/// Row-level accounting for a load.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub rows: usize,
    pub loaded: usize,
    pub skipped_bad_id: usize,
}

/// Load proposal records from a delimited file.
///
/// Rows whose ID cell does not parse as an integer are skipped and counted.
/// A missing file or missing mapped column is fatal, as are duplicate IDs.
pub fn load_proposals(path: &Path, field_map: &FieldMap) -> Result<(Vec<ProposalRecord>, LoadReport)> {
    let mut reader = csv_reader(path)?;
    let headers: Vec<String> = header_row(&mut reader, path)?;

    let mut mapped: Vec<&String> = vec![&field_map.id_column];
    mapped.extend(field_map.semantic_fields.iter());
    for column in mapped {
        if !headers.iter().any(|h| h == column) {
            return Err(Error::MissingColumn {
                path: path.to_path_buf(),
                column: column.clone(),
            });
        }
    }
    let id_idx = headers.iter().position(|h| h == &field_map.id_column).unwrap();

    let mut records = Vec::new();
    let mut report = LoadReport::default();
    for row in reader.records() {
        let row = row.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        report.rows += 1;
        let id_cell = row.get(id_idx).unwrap_or("").trim();
        let Ok(proposal_id) = id_cell.parse::<ProposalId>() else {
            report.skipped_bad_id += 1;
            continue;
        };
        let fields: IndexMap<String, String> = headers
            .iter()
            .zip(row.iter())
            .map(|(h, v)| (h.clone(), v.to_string()))
            .collect();
        records.push(ProposalRecord { proposal_id, fields });
        report.loaded += 1;
    }

    let mut seen: BTreeMap<ProposalId, usize> = BTreeMap::new();
    for r in &records {
        *seen.entry(r.proposal_id).or_default() += 1;
    }
    let duplicates: Vec<ProposalId> = seen.into_iter().filter(|(_, n)| *n > 1).map(|(id, _)| id).collect();
    if !duplicates.is_empty() {
        return Err(Error::DuplicateProposalIds(duplicates));
    }

    Ok((records, report))
}

/// Assemble the text blob for one proposal: non-empty semantic field values
/// joined with a single newline, in the given order. An all-empty record
/// yields an empty blob, which marks the document as skippable.
pub fn assemble_text(record: &ProposalRecord, semantic_fields: &[String]) -> String {
    let mut parts = Vec::new();
    for field in semantic_fields {
        if let Some(value) = record.fields.get(field) {
            let value = value.trim();
            if !value.is_empty() {
                parts.push(value);
            }
        }
    }
    parts.join("\n")
}

/// Load publication records. Rows with a non-numeric proposal ID or an empty
/// publication ID are dropped and counted.
pub fn load_publications(path: &Path) -> Result<(Vec<PublicationRecord>, LoadReport)> {
    let mut reader = csv_reader(path)?;
    let headers = header_row(&mut reader, path)?;
    let idx_of = |column: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == column)
            .ok_or_else(|| Error::MissingColumn {
                path: path.to_path_buf(),
                column: column.to_string(),
            })
    };
    let pub_idx = idx_of("publication_id")?;
    let prop_idx = idx_of("proposal_id")?;
    let title_idx = headers.iter().position(|h| h == "title");

    let mut records = Vec::new();
    let mut report = LoadReport::default();
    for row in reader.records() {
        let row = row.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        report.rows += 1;
        let publication_id = row.get(pub_idx).unwrap_or("").trim().to_string();
        let proposal_id = row.get(prop_idx).unwrap_or("").trim().parse::<ProposalId>();
        match (publication_id.is_empty(), proposal_id) {
            (false, Ok(proposal_id)) => {
                let title = title_idx
                    .and_then(|i| row.get(i))
                    .map(|t| t.to_string())
                    .filter(|t| !t.is_empty());
                records.push(PublicationRecord {
                    publication_id,
                    proposal_id,
                    title,
                });
                report.loaded += 1;
            }
            _ => report.skipped_bad_id += 1,
        }
    }
    Ok((records, report))
}

/// Write proposal records back out in the same table format (round-trip
/// counterpart of [`load_proposals`]).
pub fn write_proposals(path: &Path, records: &[ProposalRecord]) -> Result<()> {
    let Some(first) = records.first() else {
        return Err(Error::Config("cannot write an empty proposal table".into()));
    };
    let mut writer = csv::Writer::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    let headers: Vec<&String> = first.fields.keys().collect();
    writer.write_record(&headers).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    for record in records {
        let row: Vec<&str> = headers
            .iter()
            .map(|h| record.fields.get(*h).map(String::as_str).unwrap_or(""))
            .collect();
        writer.write_record(&row).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

/// Write publication records as a `publication_id, proposal_id, title` table.
pub fn write_publications(path: &Path, records: &[PublicationRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    writer
        .write_record(["publication_id", "proposal_id", "title"])
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
    for record in records {
        writer
            .write_record([
                record.publication_id.as_str(),
                &record.proposal_id.to_string(),
                record.title.as_deref().unwrap_or(""),
            ])
            .map_err(|source| Error::Csv {
                path: path.to_path_buf(),
                source,
            })?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

/// One proposal's assembled semantic text with its segmentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub proposal_id: ProposalId,
    pub raw_text: String,
    pub clean_text: String,
    pub sentences: Vec<Vec<Token>>,
}

impl Document {
    /// Sanitize and segment a raw blob into a ready-to-process document.
    pub fn build(proposal_id: ProposalId, raw_text: String, protected: &CuratedTermList) -> Document {
        let clean_text = textprep::sanitize(&raw_text, protected);
        let sentences = textprep::segment(&clean_text);
        Document {
            proposal_id,
            raw_text,
            clean_text,
            sentences,
        }
    }

    /// Documents with no tokens carry no signal and are skipped downstream.
    pub fn is_skippable(&self) -> bool {
        self.sentences.iter().all(|s| s.is_empty())
    }

    pub fn total_sentences(&self) -> usize {
        self.sentences.len()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flatten()
    }

    /// Does a stemmed phrase occur as a contiguous token run? Runs never
    /// cross sentence boundaries.
    pub fn contains_stem_run(&self, stems: &[&str]) -> bool {
        if stems.is_empty() {
            return false;
        }
        self.sentences.iter().any(|sentence| {
            sentence
                .windows(stems.len())
                .any(|w| w.iter().zip(stems).all(|(t, s)| t.stem == *s))
        })
    }
}

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    if !path.exists() {
        return Err(Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        });
    }
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })
}

fn header_row(reader: &mut csv::Reader<std::fs::File>, path: &Path) -> Result<Vec<String>> {
    Ok(reader
        .headers()
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .iter()
        .map(|h| h.to_string())
        .collect())
}
