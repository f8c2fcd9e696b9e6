//! Report rendering: label frequency lists, metric tables per cutoff and
//! the DF-threshold sweep table.

use std::collections::BTreeMap;

use super::{artifacts, ontology_matches, LabelSource, PipelineConfig};
use crate::error::{Error, Result};
use crate::eval::{compute_metrics, exact_match, macro_average, EvalMetrics};
use crate::linkage::LabelSet;
use crate::ontoannot;
use crate::pipeline::KeywordRecord;
use crate::yake::Keyword;

pub(super) fn render(config: &PipelineConfig) -> Result<()> {
    let mut any_labels = false;
    for source in [LabelSource::Linkage, LabelSource::Ontology] {
        let path = config.labels_path(source);
        if path.exists() {
            any_labels = true;
            let sets: Vec<LabelSet> = artifacts::read_jsonl(&path)?;
            label_frequency(config, source, &sets)?;
        }
    }
    if !any_labels {
        return Err(Error::MissingArtifact(config.labels_path(LabelSource::Linkage)));
    }

    for source in [LabelSource::Linkage, LabelSource::Ontology] {
        let path = config.artifact(&format!("metrics_{}.jsonl", source.name()));
        if path.exists() {
            let metrics: Vec<EvalMetrics> = artifacts::read_jsonl(&path)?;
            let rows: Vec<Vec<String>> = metrics
                .iter()
                .map(|m| {
                    vec![
                        m.n.to_string(),
                        format!("{:.6}", m.precision),
                        format!("{:.6}", m.recall),
                        format!("{:.6}", m.f1),
                    ]
                })
                .collect();
            artifacts::write_csv(
                &config.artifact(&format!("report/metrics_{}.csv", source.name())),
                &["cutoff", "precision", "recall", "f1"],
                &rows,
            )?;
        }
    }

    threshold_sweep(config)
}

/// How many documents each stemmed label appears in, most frequent first
/// (count descending, then label ascending).
fn label_frequency(
    config: &PipelineConfig,
    source: LabelSource,
    sets: &[LabelSet],
) -> Result<()> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for set in sets {
        for stem in set.stemmed_set() {
            *counts.entry(stem).or_default() += 1;
        }
    }
    let mut entries: Vec<(&str, usize)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let rows: Vec<Vec<String>> = entries
        .iter()
        .map(|(label, count)| vec![label.to_string(), count.to_string()])
        .collect();
    artifacts::write_csv(
        &config.artifact(&format!("report/label_frequency_{}.csv", source.name())),
        &["label", "documents"],
        &rows,
    )
}

/// For each configured DF threshold: the mean ontology-label count per
/// document and the macro F1 at every cutoff, using the extraction output
/// already on disk.
fn threshold_sweep(config: &PipelineConfig) -> Result<()> {
    let documents = super::load_documents(config)?;
    let keywords: Vec<KeywordRecord> = artifacts::read_jsonl(&config.artifact("keywords.jsonl"))?;
    let (per_doc, df, _, _) = ontology_matches(config, &documents)?;

    let keywords_by_id: BTreeMap<_, _> =
        keywords.iter().map(|r| (r.proposal_id, &r.keywords)).collect();

    let mut header: Vec<String> = vec!["threshold".into(), "avg_labels".into()];
    for n in &config.evaluate.cutoffs {
        header.push(format!("f1_at_{n}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();

    let mut rows = Vec::new();
    for &threshold in &config.ontology.df_thresholds {
        let mut label_sets = Vec::new();
        for (proposal_id, matches) in &per_doc {
            label_sets.push(ontoannot::apply_threshold(matches, &df, threshold, *proposal_id)?);
        }
        let evaluable = label_sets.iter().filter(|s| !s.is_empty()).count();
        let avg_labels = if label_sets.is_empty() {
            0.0
        } else {
            label_sets.iter().map(|s| s.len() as f64).sum::<f64>() / label_sets.len() as f64
        };
        let mut row = vec![format!("{}", threshold), format!("{avg_labels:.4}")];
        for &n in &config.evaluate.cutoffs {
            let mut per_document = Vec::new();
            for set in &label_sets {
                if set.is_empty() {
                    continue;
                }
                let Some(doc_keywords) = keywords_by_id.get(&set.proposal_id) else {
                    continue;
                };
                let top: Vec<Keyword> =
                    doc_keywords.iter().filter(|k| k.rank <= n).cloned().collect();
                let (matched, _) = exact_match(&top, set);
                per_document.push(compute_metrics(matched, top.len(), set.len(), n)?);
            }
            if evaluable == 0 {
                row.push("0.000000".into());
            } else {
                let corpus = macro_average(&per_document)?;
                row.push(format!("{:.6}", corpus.f1));
            }
        }
        rows.push(row);
    }
    artifacts::write_csv(&config.artifact("report/threshold_sweep.csv"), &header_refs, &rows)
}
