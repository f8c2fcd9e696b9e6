//! Crate-wide error type.

use std::path::PathBuf;

/// Errors surfaced by loading, configuration and pipeline stages.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed delimited file {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("column {column:?} not found in {path}")]
    MissingColumn { path: PathBuf, column: String },

    #[error("duplicate proposal ids: {}", format_ids(.0))]
    DuplicateProposalIds(Vec<crate::ProposalId>),

    #[error("dictionary {path} produced no indexed terms after branch pruning")]
    EmptyDictionary { path: PathBuf },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing upstream artifact: {0}")]
    MissingArtifact(PathBuf),

    #[error("malformed record in {path} at line {line}: {reason}")]
    MalformedRecord {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("no evaluable documents (every document had zero labels)")]
    NoEvaluableDocuments,

    #[error("document has zero labels and cannot be evaluated")]
    ZeroLabels,
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

fn format_ids(ids: &[crate::ProposalId]) -> String {
    let shown: Vec<String> = ids.iter().take(10).map(|id| id.to_string()).collect();
    if ids.len() > 10 {
        format!("{} (+{} more)", shown.join(", "), ids.len() - 10)
    } else {
        shown.join(", ")
    }
}
