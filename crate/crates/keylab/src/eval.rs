//! Stemmed exact-match evaluation: precision, recall and F1 at a cutoff.
//!
//! A machine keyword counts as correct only if its stemmed form equals a
//! stemmed derived label. All functions are pure; per-document evaluation
//! is trivially parallel.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkage::LabelSet;
use crate::yake::Keyword;

/// Counts and rates for one document (or a macro average) at cutoff `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub n: usize,
    pub matched: usize,
    pub extracted: usize,
    pub labels: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Harmonic mean of precision and recall; 0 when either is 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision <= 0.0 || recall <= 0.0 {
        0.0
    } else {
        2.0 / (recall.recip() + precision.recip())
    }
}

/// Count distinct stemmed keywords that appear among the distinct stemmed
/// labels; the matched `(keyword surface, label surface)` pairs are
/// returned for audit.
pub fn exact_match(keywords: &[Keyword], labels: &LabelSet) -> (usize, Vec<(String, String)>) {
    let keyword_stems: BTreeSet<&str> = keywords.iter().map(|k| k.stemmed.as_str()).collect();
    let label_stems: BTreeSet<&str> = labels.stemmed_set();
    let mut pairs = Vec::new();
    for stem in keyword_stems.intersection(&label_stems) {
        let keyword = keywords.iter().find(|k| k.stemmed == *stem).unwrap();
        let label = labels.labels.iter().find(|l| l.stemmed == *stem).unwrap();
        pairs.push((keyword.surface.clone(), label.surface.clone()));
    }
    (pairs.len(), pairs)
}

/// Metrics from raw counts. `extracted` is the number actually returned,
/// which may be below the cutoff. A document with zero labels cannot be
/// evaluated and must be excluded from averaging.
pub fn compute_metrics(
    matched: usize,
    extracted: usize,
    labels: usize,
    n: usize,
) -> Result<EvalMetrics> {
    if labels == 0 {
        return Err(Error::ZeroLabels);
    }
    let precision = if extracted == 0 {
        0.0
    } else {
        matched as f64 / extracted as f64
    };
    let recall = matched as f64 / labels as f64;
    Ok(EvalMetrics {
        n,
        matched,
        extracted,
        labels,
        precision,
        recall,
        f1: f1_score(precision, recall),
    })
}

/// Unweighted mean of precision, recall and F1 over evaluable documents;
/// counts are summed for audit.
pub fn macro_average(per_document: &[EvalMetrics]) -> Result<EvalMetrics> {
    if per_document.is_empty() {
        return Err(Error::NoEvaluableDocuments);
    }
    let d = per_document.len() as f64;
    Ok(EvalMetrics {
        n: per_document[0].n,
        matched: per_document.iter().map(|m| m.matched).sum(),
        extracted: per_document.iter().map(|m| m.extracted).sum(),
        labels: per_document.iter().map(|m| m.labels).sum(),
        precision: per_document.iter().map(|m| m.precision).sum::<f64>() / d,
        recall: per_document.iter().map(|m| m.recall).sum::<f64>() / d,
        f1: per_document.iter().map(|m| m.f1).sum::<f64>() / d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkage::{Label, Provenance};
    use crate::textprep::stem_phrase;

    fn keyword(surface: &str) -> Keyword {
        Keyword {
            surface: surface.to_string(),
            stemmed: stem_phrase(surface),
            score: 0.1,
            rank: 1,
        }
    }

    fn label_set(surfaces: &[&str]) -> LabelSet {
        LabelSet {
            proposal_id: 1,
            labels: surfaces
                .iter()
                .map(|s| Label {
                    surface: s.to_string(),
                    stemmed: stem_phrase(s),
                    provenance: Provenance::Ontology { curie: "X:1".into() },
                })
                .collect(),
        }
    }

    #[test]
    fn set_intersection_semantics() {
        let keywords = vec![keyword("genome"), keyword("soil")];
        let labels = label_set(&["genomes", "carbon"]);
        let (matched, pairs) = exact_match(&keywords, &labels);
        assert_eq!(matched, 1);
        assert_eq!(pairs, vec![("genome".to_string(), "genomes".to_string())]);
    }

    #[test]
    fn exact_match_penalty_on_longer_label() {
        let keywords = vec![keyword("clostridium thermocellum")];
        let labels = label_set(&["clostridium thermocellum dsm 1313"]);
        let (matched, _) = exact_match(&keywords, &labels);
        assert_eq!(matched, 0);
    }

    #[test]
    fn empty_keyword_list_matches_nothing() {
        let (matched, pairs) = exact_match(&[], &label_set(&["genome"]));
        assert_eq!(matched, 0);
        assert!(pairs.is_empty());
    }

    #[test]
    fn duplicate_stems_count_once() {
        let keywords = vec![keyword("genome"), keyword("genomes")];
        let labels = label_set(&["genome"]);
        let (matched, _) = exact_match(&keywords, &labels);
        assert_eq!(matched, 1);
    }

    #[test]
    fn metric_arithmetic() {
        let m = compute_metrics(1, 2, 4, 5).unwrap();
        assert_eq!(m.precision, 0.5);
        assert_eq!(m.recall, 0.25);
        assert!((m.f1 - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn printed_table_row_reproduces() {
        assert!((f1_score(0.200, 0.340) - 0.252).abs() < 1e-3);
    }

    #[test]
    fn zero_matched_gives_zero_f1() {
        let m = compute_metrics(0, 5, 4, 5).unwrap();
        assert_eq!(m.f1, 0.0);
        assert_eq!(m.precision, 0.0);
    }

    #[test]
    fn zero_extracted_gives_zero_precision() {
        let m = compute_metrics(0, 0, 4, 5).unwrap();
        assert_eq!(m.precision, 0.0);
        assert_eq!(m.f1, 0.0);
    }

    #[test]
    fn zero_labels_is_unevaluable() {
        assert!(matches!(compute_metrics(0, 5, 0, 5), Err(Error::ZeroLabels)));
    }

    #[test]
    fn harmonic_mean_properties() {
        for p in [0.1, 0.25, 0.5, 0.9] {
            for r in [0.1, 0.3, 0.7, 1.0] {
                let f1 = f1_score(p, r);
                assert!(f1 >= p.min(r) - 1e-12);
                assert!(f1 <= p.max(r) + 1e-12);
            }
        }
        assert!((f1_score(0.4, 0.4) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn macro_average_is_unweighted_mean() {
        let a = compute_metrics(1, 5, 10, 5).unwrap();
        let b = compute_metrics(2, 5, 5, 5).unwrap();
        let avg = macro_average(&[a.clone(), b.clone()]).unwrap();
        assert!((avg.f1 - (a.f1 + b.f1) / 2.0).abs() < 1e-12);
        assert_eq!(avg.matched, 3);
        assert_eq!(avg.labels, 15);

        let single = macro_average(std::slice::from_ref(&a)).unwrap();
        assert_eq!(single, a);
    }

    #[test]
    fn macro_average_requires_documents() {
        assert!(matches!(macro_average(&[]), Err(Error::NoEvaluableDocuments)));
    }
}
