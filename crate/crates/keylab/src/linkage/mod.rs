//! Publication-derived labels: join proposals to publications on proposal ID,
//! gather keywords from the keyword store, keep the ones present in the
//! proposal text.
//!
//! Label derivation is per-proposal independent and the keyword store is
//! immutable after load, so proposals may be processed concurrently.

pub mod pubmed;

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, ProposalRecord, PublicationRecord};
use crate::error::{Error, Result};
use crate::textprep::stem_phrase;
use crate::ProposalId;

/// Where a publication keyword came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeywordSource {
    WosAuthor,
    PubmedAuthor,
    Mesh,
}

/// A keyword attached to a publication, tagged with its source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawKeyword {
    pub text: String,
    pub source: KeywordSource,
    pub publication_id: String,
}

impl RawKeyword {
    /// Normalizes the text: trims, and strips MeSH qualifier subterms
    /// (everything after `/`), keeping the descriptor only.
    pub fn new(text: &str, source: KeywordSource, publication_id: &str) -> Option<RawKeyword> {
        let text = match source {
            KeywordSource::Mesh => text.split('/').next().unwrap_or(""),
            _ => text,
        };
        let text = text.trim();
        if text.is_empty() {
            return None;
        }
        Some(RawKeyword {
            text: text.to_string(),
            source,
            publication_id: publication_id.to_string(),
        })
    }
}

/// How a label was derived.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "provenance", rename_all = "snake_case")]
pub enum Provenance {
    /// Transferred from linked publications; `sources` lists every keyword
    /// source that contributed the stemmed form.
    Linkage { sources: Vec<KeywordSource> },
    /// Matched from an ontology dictionary.
    Ontology { curie: String },
}

/// A derived ground-truth label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Label {
    pub surface: String,
    pub stemmed: String,
    #[serde(flatten)]
    pub provenance: Provenance,
}

/// Derived labels for one document. Stemmed forms are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    pub proposal_id: ProposalId,
    pub labels: Vec<Label>,
}

impl LabelSet {
    pub fn stemmed_set(&self) -> BTreeSet<&str> {
        self.labels.iter().map(|l| l.stemmed.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Join accounting produced by [`link`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LinkReport {
    pub proposals_with_publications: usize,
    pub linked_publications: usize,
    /// Publication IDs whose proposal ID is unknown.
    pub orphaned: Vec<String>,
}

/// Join publications onto proposals by proposal ID. Every proposal appears
/// as a key, possibly with an empty list; publications referencing unknown
/// proposals are reported as orphans, not attached.
pub fn link(
    proposals: &[ProposalRecord],
    publications: &[PublicationRecord],
) -> (BTreeMap<ProposalId, Vec<PublicationRecord>>, LinkReport) {
    let mut by_proposal: BTreeMap<ProposalId, Vec<PublicationRecord>> =
        proposals.iter().map(|p| (p.proposal_id, Vec::new())).collect();
    let mut report = LinkReport::default();
    for publication in publications {
        match by_proposal.get_mut(&publication.proposal_id) {
            Some(list) => {
                list.push(publication.clone());
                report.linked_publications += 1;
            }
            None => report.orphaned.push(publication.publication_id.clone()),
        }
    }
    report.proposals_with_publications = by_proposal.values().filter(|v| !v.is_empty()).count();
    (by_proposal, report)
}

/// Line-delimited keyword-source record, one JSON object per line:
/// `{"publication_id": .., "source": .., "keywords": [..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoreRecord {
    pub publication_id: String,
    pub source: KeywordSource,
    pub keywords: Vec<String>,
}

/// Immutable keyword store keyed by publication ID.
#[derive(Debug, Clone, Default)]
pub struct KeywordStore {
    by_publication: BTreeMap<String, Vec<RawKeyword>>,
}

impl KeywordStore {
    pub fn load(path: &Path) -> Result<KeywordStore> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut records = Vec::new();
        for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let record: StoreRecord =
                serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                    path: path.to_path_buf(),
                    line: i + 1,
                    reason: e.to_string(),
                })?;
            records.push(record);
        }
        Ok(KeywordStore::from_records(records))
    }

    /// Build from records, deduplicating exact `(text, source)` pairs per
    /// publication while preserving first-seen order.
    pub fn from_records(records: Vec<StoreRecord>) -> KeywordStore {
        let mut by_publication: BTreeMap<String, Vec<RawKeyword>> = BTreeMap::new();
        let mut seen: BTreeSet<(String, KeywordSource, String)> = BTreeSet::new();
        for record in records {
            for keyword in &record.keywords {
                if let Some(raw) = RawKeyword::new(keyword, record.source, &record.publication_id)
                {
                    let key = (raw.publication_id.clone(), raw.source, raw.text.clone());
                    if seen.insert(key) {
                        by_publication.entry(raw.publication_id.clone()).or_default().push(raw);
                    }
                }
            }
        }
        KeywordStore { by_publication }
    }

    pub fn keywords_for(&self, publication_id: &str) -> Option<&[RawKeyword]> {
        self.by_publication.get(publication_id).map(Vec::as_slice)
    }

    pub fn publications(&self) -> usize {
        self.by_publication.len()
    }
}

/// Union the keywords of the given publications, preserving source tags.
/// Exact `(text, source)` duplicates collapse; publications absent from the
/// store contribute nothing and are counted.
pub fn collect_keywords(
    publication_ids: &[String],
    store: &KeywordStore,
) -> (Vec<RawKeyword>, usize) {
    let mut keywords = Vec::new();
    let mut seen: BTreeSet<(String, KeywordSource)> = BTreeSet::new();
    let mut missing = 0;
    for publication_id in publication_ids {
        match store.keywords_for(publication_id) {
            Some(entries) => {
                for raw in entries {
                    if seen.insert((raw.text.clone(), raw.source)) {
                        keywords.push(raw.clone());
                    }
                }
            }
            None => missing += 1,
        }
    }
    (keywords, missing)
}

/// Keep keywords whose stemmed phrase occurs as a contiguous run of stemmed
/// document tokens; deduplicate by stemmed form, merging source tags.
pub fn filter_present(keywords: &[RawKeyword], doc: &Document) -> LabelSet {
    let mut labels: Vec<Label> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for keyword in keywords {
        let stemmed = stem_phrase(&keyword.text);
        if stemmed.is_empty() {
            continue;
        }
        let stems: Vec<&str> = stemmed.split(' ').collect();
        if !doc.contains_stem_run(&stems) {
            continue;
        }
        match index.get(&stemmed) {
            Some(&i) => {
                if let Provenance::Linkage { sources } = &mut labels[i].provenance {
                    if !sources.contains(&keyword.source) {
                        sources.push(keyword.source);
                        sources.sort();
                    }
                }
            }
            None => {
                index.insert(stemmed.clone(), labels.len());
                labels.push(Label {
                    surface: keyword.text.clone(),
                    stemmed,
                    provenance: Provenance::Linkage {
                        sources: vec![keyword.source],
                    },
                });
            }
        }
    }
    LabelSet {
        proposal_id: doc.proposal_id,
        labels,
    }
}
