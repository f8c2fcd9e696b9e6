//! Corpus-to-keywords toolkit for unlabeled scientific texts.
//!
//! The library derives validation labels for a corpus of proposal documents
//! along two routes — linking proposals to publication keyword records, and
//! annotating texts against pruned ontology term dictionaries with
//! document-frequency ranking — then extracts keyphrases with a statistical
//! unsupervised extractor and scores them against the derived labels using
//! stemmed exact matching (precision/recall/F1 at N).
//!
//! Modules mirror the pipeline stages:
//!
//! - [`corpus`]: delimited-file loading and text-blob assembly
//! - [`textprep`]: sanitization, segmentation, stopwords, Porter stemming
//! - [`linkage`]: publication-derived labels via proposal-ID joins
//! - [`ontoannot`]: ontology-derived labels via dictionary matching + DF filter
//! - [`yake`]: statistical keyphrase extraction with four hyperparameters
//! - [`eval`]: stemmed exact-match P/R/F1 at a cutoff
//! - [`tune`]: exhaustive hyperparameter grid search
//! - [`pipeline`]: config-driven orchestration and report rendering

pub mod corpus;
pub mod error;
pub mod eval;
pub mod linkage;
pub mod ontoannot;
pub mod pipeline;
pub mod textprep;
pub mod tune;
pub mod yake;

pub use error::{Error, Result};

/// Integer identifier shared by proposals and their linked publications.
pub type ProposalId = i64;
