//! Ontology-derived labels: branch-pruned term dictionaries, longest-match
//! annotation over stemmed token sequences, short-word filtering and the
//! document-frequency threshold.
//!
//! The dictionary and DF table are immutable after construction; `annotate`
//! is pure per document, so corpus-wide work can fan out per document and
//! reduce into a single DF table.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::linkage::{Label, LabelSet, Provenance};
use crate::textprep::{stem, term_tokens};
use crate::ProposalId;

/// One exported ontology term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyTerm {
    pub surface: String,
    /// Compact identifier, e.g. `ENVO:00001998`.
    pub curie: String,
    pub ontology: String,
    pub branch: String,
}

/// Which branches of which ontologies survive pruning. An ontology absent
/// from the allowlist (or present with an empty branch list) is excluded
/// entirely; `*` admits every branch of an ontology.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BranchAllowlist(pub BTreeMap<String, BTreeSet<String>>);

impl BranchAllowlist {
    pub fn new(entries: &[(&str, &[&str])]) -> BranchAllowlist {
        BranchAllowlist(
            entries
                .iter()
                .map(|(ontology, branches)| {
                    (
                        ontology.to_string(),
                        branches.iter().map(|b| b.to_string()).collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn allows(&self, ontology: &str, branch: &str) -> bool {
        self.0
            .get(ontology)
            .is_some_and(|branches| branches.contains("*") || branches.contains(branch))
    }
}

#[derive(Debug, Default)]
struct TrieNode {
    children: BTreeMap<String, TrieNode>,
    terminal: Option<usize>,
}

/// Branch-pruned term index supporting longest-match lookup over stemmed
/// token sequences. Terms whose stemmed sequences collide keep the
/// first-loaded entry.
#[derive(Debug, Default)]
pub struct TermDictionary {
    root: TrieNode,
    terms: Vec<OntologyTerm>,
}

/// Row-level accounting for dictionary construction.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DictLoadReport {
    pub rows: usize,
    pub indexed: usize,
    pub excluded_by_branch: usize,
    pub malformed: usize,
    pub duplicate_stems: usize,
}

impl TermDictionary {
    /// Index terms, applying branch pruning.
    pub fn from_terms(
        terms: impl IntoIterator<Item = OntologyTerm>,
        allowlist: &BranchAllowlist,
    ) -> (TermDictionary, DictLoadReport) {
        let mut dict = TermDictionary::default();
        let mut report = DictLoadReport::default();
        for term in terms {
            report.rows += 1;
            if !allowlist.allows(&term.ontology, &term.branch) {
                report.excluded_by_branch += 1;
                continue;
            }
            let stems = stemmed_term_tokens(&term.surface);
            if stems.is_empty() {
                report.malformed += 1;
                continue;
            }
            let mut node = &mut dict.root;
            for s in &stems {
                node = node.children.entry(s.clone()).or_default();
            }
            if node.terminal.is_some() {
                report.duplicate_stems += 1;
                continue;
            }
            node.terminal = Some(dict.terms.len());
            dict.terms.push(term);
            report.indexed += 1;
        }
        (dict, report)
    }

    /// Longest dictionary match starting at `start`; returns the match
    /// length in tokens and the matched term.
    pub fn longest_match_at(&self, stems: &[&str], start: usize) -> Option<(usize, &OntologyTerm)> {
        let mut node = &self.root;
        let mut best: Option<(usize, usize)> = None;
        for (offset, s) in stems[start..].iter().enumerate() {
            match node.children.get(*s) {
                Some(child) => node = child,
                None => break,
            }
            if let Some(idx) = node.terminal {
                best = Some((offset + 1, idx));
            }
        }
        best.map(|(len, idx)| (len, &self.terms[idx]))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[OntologyTerm] {
        &self.terms
    }
}

/// Stem a term surface with the same token normalization applied to
/// documents (punctuation stripped, numbers kept).
pub fn stemmed_term_tokens(surface: &str) -> Vec<String> {
    term_tokens(surface)
        .iter()
        .map(|t| stem(&t.to_lowercase()))
        .collect()
}

/// Load a dictionary from a tab-separated term list with columns
/// `surface, curie, ontology, branch`; `#` lines are comments. Malformed
/// rows are skipped and counted; an empty result is fatal.
pub fn load_dictionary(
    path: &Path,
    allowlist: &BranchAllowlist,
) -> Result<(TermDictionary, DictLoadReport)> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut terms = Vec::new();
    let mut malformed_rows = 0usize;
    for line in std::io::BufReader::new(file).lines() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 4 || cols[..4].iter().any(|c| c.trim().is_empty()) {
            malformed_rows += 1;
            continue;
        }
        terms.push(OntologyTerm {
            surface: cols[0].trim().to_string(),
            curie: cols[1].trim().to_string(),
            ontology: cols[2].trim().to_string(),
            branch: cols[3].trim().to_string(),
        });
    }
    let (dict, mut report) = TermDictionary::from_terms(terms, allowlist);
    report.malformed += malformed_rows;
    report.rows += malformed_rows;
    if dict.is_empty() {
        return Err(Error::EmptyDictionary {
            path: path.to_path_buf(),
        });
    }
    Ok((dict, report))
}

/// A dictionary term found in a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedTerm {
    pub term: OntologyTerm,
    /// Surface forms of the matched tokens, joined with single spaces.
    pub surface_in_doc: String,
    pub stemmed: String,
    pub sentence: usize,
    /// Token span `[start, end)` within the sentence.
    pub start: usize,
    pub end: usize,
}

/// Scan each sentence's stemmed tokens, keeping only the longest dictionary
/// match at each start position. Matches never cross sentence boundaries;
/// every matching position yields its own [`MatchedTerm`].
pub fn annotate(doc: &Document, dict: &TermDictionary) -> Vec<MatchedTerm> {
    let mut matches = Vec::new();
    for (sentence_idx, sentence) in doc.sentences.iter().enumerate() {
        let stems: Vec<&str> = sentence.iter().map(|t| t.stem.as_str()).collect();
        for start in 0..stems.len() {
            if let Some((len, term)) = dict.longest_match_at(&stems, start) {
                let surface_in_doc = sentence[start..start + len]
                    .iter()
                    .map(|t| t.surface.as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                matches.push(MatchedTerm {
                    term: term.clone(),
                    surface_in_doc,
                    stemmed: stems[start..start + len].join(" "),
                    sentence: sentence_idx,
                    start,
                    end: start + len,
                });
            }
        }
    }
    matches
}

/// Drop matches whose in-document surface has fewer than three characters,
/// unless the surface is all-uppercase letters (acronym exemption).
pub fn filter_short(matches: Vec<MatchedTerm>) -> Vec<MatchedTerm> {
    matches
        .into_iter()
        .filter(|m| {
            m.surface_in_doc.chars().count() >= 3
                || (!m.surface_in_doc.is_empty()
                    && m.surface_in_doc.chars().all(|c| c.is_uppercase()))
        })
        .collect()
}

/// Document frequencies of matched stemmed terms over a corpus of size `D`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DfTable {
    counts: BTreeMap<String, usize>,
    pub corpus_size: usize,
}

impl DfTable {
    /// Documents containing the term; 0 when the term was never matched.
    pub fn count(&self, stemmed: &str) -> usize {
        self.counts.get(stemmed).copied().unwrap_or(0)
    }

    /// DF(w) = count / corpus size; 0 for absent terms.
    pub fn df(&self, stemmed: &str) -> f64 {
        if self.corpus_size == 0 {
            return 0.0;
        }
        self.count(stemmed) as f64 / self.corpus_size as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.counts.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Build the DF table from per-document matched stem sets.
pub fn build_df(matches_per_document: &[BTreeSet<String>]) -> DfTable {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for doc_terms in matches_per_document {
        for term in doc_terms {
            *counts.entry(term.clone()).or_default() += 1;
        }
    }
    DfTable {
        counts,
        corpus_size: matches_per_document.len(),
    }
}

/// Keep matches whose document count is at most `ceil(threshold * D)`;
/// deduplicate by stemmed form into an ontology-provenance label set.
pub fn apply_threshold(
    matches: &[MatchedTerm],
    df: &DfTable,
    threshold: f64,
    proposal_id: ProposalId,
) -> Result<LabelSet> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Config(format!(
            "df threshold must be in (0, 1], got {threshold}"
        )));
    }
    let limit = (threshold * df.corpus_size as f64).ceil() as usize;
    let mut labels: Vec<Label> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for m in matches {
        if df.count(&m.stemmed) > limit {
            continue;
        }
        if seen.insert(m.stemmed.clone()) {
            labels.push(Label {
                surface: m.surface_in_doc.clone(),
                stemmed: m.stemmed.clone(),
                provenance: Provenance::Ontology {
                    curie: m.term.curie.clone(),
                },
            });
        }
    }
    Ok(LabelSet {
        proposal_id,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textprep::CuratedTermList;

    fn term(surface: &str, curie: &str, ontology: &str, branch: &str) -> OntologyTerm {
        OntologyTerm {
            surface: surface.to_string(),
            curie: curie.to_string(),
            ontology: ontology.to_string(),
            branch: branch.to_string(),
        }
    }

    fn doc(text: &str) -> Document {
        Document::build(1, text.to_string(), &CuratedTermList::empty())
    }

    #[test]
    fn branch_pruning_keeps_only_allowlisted_rows() {
        let terms = vec![
            term("sequence analysis", "EDAM:1", "EDAM", "Topic"),
            term("fasta format", "EDAM:2", "EDAM", "Format"),
            term("sequence record", "EDAM:3", "EDAM", "Data"),
        ];
        let allowlist = BranchAllowlist::new(&[("EDAM", &["Topic"])]);
        let (dict, report) = TermDictionary::from_terms(terms, &allowlist);
        assert_eq!(dict.len(), 1);
        assert_eq!(report.excluded_by_branch, 2);
        assert_eq!(dict.terms()[0].curie, "EDAM:1");
    }

    #[test]
    fn empty_allowlist_entry_excludes_whole_ontology() {
        let terms = vec![term("mass", "PATO:1", "PATO", "physical quality")];
        let allowlist = BranchAllowlist::new(&[("PATO", &[])]);
        let (dict, report) = TermDictionary::from_terms(terms, &allowlist);
        assert!(dict.is_empty());
        assert_eq!(report.excluded_by_branch, 1);

        let allowlist = BranchAllowlist::new(&[("PATO", &["physical quality"])]);
        let (dict, _) = TermDictionary::from_terms(
            vec![term("mass", "PATO:1", "PATO", "physical quality")],
            &allowlist,
        );
        assert_eq!(dict.len(), 1);
    }

    #[test]
    fn annotate_finds_multiword_match() {
        let allowlist = BranchAllowlist::new(&[("NCBITaxon", &["*"])]);
        let (dict, _) = TermDictionary::from_terms(
            vec![term("johnson grass", "T:1", "NCBITaxon", "species")],
            &allowlist,
        );
        let d = doc("Johnson grass grows fast.");
        let matches = annotate(&d, &dict);
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].surface_in_doc, "Johnson grass");
        assert_eq!(matches[0].start, 0);
        assert_eq!(matches[0].end, 2);
    }

    #[test]
    fn longest_match_wins_at_each_start() {
        let allowlist = BranchAllowlist::new(&[("GO", &["*"])]);
        let (dict, _) = TermDictionary::from_terms(
            vec![
                term("cell", "GO:1", "GO", "component"),
                term("cell wall", "GO:2", "GO", "component"),
            ],
            &allowlist,
        );
        let d = doc("the cell wall thickens");
        let matches = annotate(&d, &dict);
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].term.curie, "GO:2");
        assert_eq!(matches[0].stemmed, "cell wall");
    }

    #[test]
    fn pruned_acronym_expansion_does_not_match() {
        // a short stem like "serv" only matches if its branch survives
        let terms = vec![term("SERV", "TAX:1", "NCBITaxon", "virus")];
        let allowlist = BranchAllowlist::new(&[("NCBITaxon", &["bacteria"])]);
        let (dict, _) = TermDictionary::from_terms(terms, &allowlist);
        let d = doc("systems that serve the community");
        assert!(annotate(&d, &dict).is_empty());
    }

    #[test]
    fn matches_do_not_cross_sentences() {
        let allowlist = BranchAllowlist::new(&[("GO", &["*"])]);
        let (dict, _) =
            TermDictionary::from_terms(vec![term("cell wall", "GO:2", "GO", "c")], &allowlist);
        let d = doc("We study the cell. Wall structures differ.");
        assert!(annotate(&d, &dict).is_empty());
    }

    #[test]
    fn repeated_positions_yield_repeated_matches() {
        let allowlist = BranchAllowlist::new(&[("GO", &["*"])]);
        let (dict, _) =
            TermDictionary::from_terms(vec![term("soil", "E:1", "GO", "c")], &allowlist);
        let d = doc("soil on soil");
        let matches = annotate(&d, &dict);
        assert_eq!(matches.len(), 2);
        assert_eq!((matches[0].start, matches[1].start), (0, 2));
    }

    #[test]
    fn short_word_rule_with_acronym_exemption() {
        let mk = |surface: &str| MatchedTerm {
            term: term("x", "X:1", "O", "b"),
            surface_in_doc: surface.to_string(),
            stemmed: surface.to_lowercase(),
            sentence: 0,
            start: 0,
            end: 1,
        };
        let kept = filter_short(vec![mk("ph"), mk("DNA"), mk("pH"), mk("PH"), mk("SOB")]);
        let surfaces: Vec<&str> = kept.iter().map(|m| m.surface_in_doc.as_str()).collect();
        assert_eq!(surfaces, ["DNA", "PH", "SOB"]);
    }

    #[test]
    fn df_formula() {
        let sets: Vec<BTreeSet<String>> = vec![
            ["soil".to_string()].into_iter().collect(),
            ["soil".to_string(), "carbon".to_string()].into_iter().collect(),
            ["carbon".to_string()].into_iter().collect(),
            ["carbon".to_string()].into_iter().collect(),
        ];
        let df = build_df(&sets);
        assert_eq!(df.df("soil"), 0.5);
        assert_eq!(df.count("carbon"), 3);
        assert_eq!(df.df("absent"), 0.0);
    }

    #[test]
    fn threshold_limit_examples() {
        // 1% of 184 documents -> at most two documents
        assert_eq!((0.01_f64 * 184.0).ceil() as usize, 2);
        // 1% of 4 documents -> only corpus-unique terms survive
        assert_eq!((0.01_f64 * 4.0).ceil() as usize, 1);
    }

    #[test]
    fn threshold_filters_and_dedups() {
        let m = |surface: &str, stemmed: &str| MatchedTerm {
            term: term(surface, "C:1", "O", "b"),
            surface_in_doc: surface.to_string(),
            stemmed: stemmed.to_string(),
            sentence: 0,
            start: 0,
            end: 1,
        };
        let matches = vec![m("soil", "soil"), m("Soil", "soil"), m("carbon", "carbon")];
        let sets: Vec<BTreeSet<String>> = vec![
            ["soil".to_string(), "carbon".to_string()].into_iter().collect(),
            ["carbon".to_string()].into_iter().collect(),
            ["carbon".to_string()].into_iter().collect(),
            BTreeSet::new(),
        ];
        let df = build_df(&sets);
        // limit = ceil(0.25 * 4) = 1: carbon (3 docs) filtered out
        let labels = apply_threshold(&matches, &df, 0.25, 9).unwrap();
        assert_eq!(labels.len(), 1);
        assert_eq!(labels.labels[0].stemmed, "soil");

        // threshold 100% keeps everything, deduplicated
        let labels = apply_threshold(&matches, &df, 1.0, 9).unwrap();
        assert_eq!(labels.len(), 2);
    }

    #[test]
    fn threshold_out_of_range_is_config_error() {
        let df = build_df(&[]);
        assert!(apply_threshold(&[], &df, 0.0, 1).is_err());
        assert!(apply_threshold(&[], &df, 1.5, 1).is_err());
    }

    #[test]
    fn dictionary_file_round_trip() {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# term list").unwrap();
        writeln!(f, "soil\tENVO:00001998\tEnvO\tenvironmental material").unwrap();
        writeln!(f, "broken row no tabs").unwrap();
        writeln!(f, "cell wall\tGO:0005618\tGO\tcellular component").unwrap();
        f.flush().unwrap();
        let allowlist =
            BranchAllowlist::new(&[("EnvO", &["environmental material"]), ("GO", &["*"])]);
        let (dict, report) = load_dictionary(f.path(), &allowlist).unwrap();
        assert_eq!(dict.len(), 2);
        assert_eq!(report.malformed, 1);
    }

    #[test]
    fn empty_dictionary_is_fatal() {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "soil\tENVO:1\tEnvO\tmaterial").unwrap();
        f.flush().unwrap();
        let err = load_dictionary(f.path(), &BranchAllowlist::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyDictionary { .. }));
    }
}
