//! Exhaustive grid search over the four extractor hyperparameters.
//!
//! The grid is enumerated ngram-major (then window, dedup method, dedup
//! threshold); the winner is the argmax of macro-averaged F1 with ties
//! broken toward the smaller/simpler configuration, which is exactly the
//! grid order. Cells are independent and evaluated in parallel, reduced in
//! grid order so parallel and serial sweeps are identical.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::eval::{compute_metrics, exact_match, macro_average, EvalMetrics};
use crate::linkage::LabelSet;
use crate::textprep::StopwordList;
use crate::yake::{extract, DedupMethod, YakeConfig};
use crate::ProposalId;

/// Per-parameter value lists defining the sweep grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpace {
    pub ngrams: Vec<usize>,
    pub windows: Vec<usize>,
    pub dedup_methods: Vec<DedupMethod>,
    pub dedup_thresholds: Vec<f64>,
}

impl Default for SweepSpace {
    /// The full 3 x 3 x 3 x 5 = 135-combination space.
    fn default() -> Self {
        SweepSpace {
            ngrams: vec![1, 2, 3],
            windows: vec![1, 2, 3],
            dedup_methods: DedupMethod::ALL.to_vec(),
            dedup_thresholds: vec![0.6, 0.7, 0.8, 0.9, 0.95],
        }
    }
}

/// Cartesian product of the space in deterministic ngram-major order.
pub fn grid(space: &SweepSpace, top_n: usize) -> Result<Vec<YakeConfig>> {
    if space.ngrams.is_empty()
        || space.windows.is_empty()
        || space.dedup_methods.is_empty()
        || space.dedup_thresholds.is_empty()
    {
        return Err(Error::Config("sweep space has an empty parameter list".into()));
    }
    let mut configs = Vec::new();
    for &ngram in &space.ngrams {
        for &window in &space.windows {
            for &dedup_method in &space.dedup_methods {
                for &dedup_threshold in &space.dedup_thresholds {
                    configs.push(YakeConfig {
                        ngram,
                        window,
                        dedup_method,
                        dedup_threshold,
                        top_n,
                    });
                }
            }
        }
    }
    Ok(configs)
}

/// Leaderboard for one cutoff: every grid cell exactly once, plus the
/// argmax-F1 winner.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub leaderboard: Vec<(YakeConfig, EvalMetrics)>,
    pub best_index: usize,
    pub tie_break_applied: bool,
}

impl SweepResult {
    pub fn best(&self) -> &(YakeConfig, EvalMetrics) {
        &self.leaderboard[self.best_index]
    }
}

/// Evaluate one configuration over the corpus: extract top-n per document,
/// score against its label set, macro-average. Documents without labels (or
/// with empty label sets) are excluded.
pub fn evaluate_config(
    docs: &[Document],
    labels: &BTreeMap<ProposalId, LabelSet>,
    config: &YakeConfig,
    stopwords: &StopwordList,
) -> Result<EvalMetrics> {
    let mut per_document = Vec::new();
    for doc in docs {
        let Some(label_set) = labels.get(&doc.proposal_id) else {
            continue;
        };
        if label_set.is_empty() {
            continue;
        }
        let keywords = extract(doc, config, stopwords);
        let (matched, _) = exact_match(&keywords, label_set);
        per_document.push(compute_metrics(
            matched,
            keywords.len(),
            label_set.len(),
            config.top_n,
        )?);
    }
    macro_average(&per_document)
}

/// Run the full grid at cutoff `n` and select the best mean F1.
pub fn sweep(
    docs: &[Document],
    labels: &BTreeMap<ProposalId, LabelSet>,
    space: &SweepSpace,
    n: usize,
    stopwords: &StopwordList,
) -> Result<SweepResult> {
    let configs = grid(space, n)?;
    let cells: Vec<Result<EvalMetrics>> = configs
        .par_iter()
        .map(|config| evaluate_config(docs, labels, config, stopwords))
        .collect();
    let mut leaderboard = Vec::with_capacity(configs.len());
    for (config, cell) in configs.into_iter().zip(cells) {
        leaderboard.push((config, cell?));
    }
    finish(leaderboard)
}

/// Serial counterpart of [`sweep`]; produces an identical leaderboard.
pub fn sweep_serial(
    docs: &[Document],
    labels: &BTreeMap<ProposalId, LabelSet>,
    space: &SweepSpace,
    n: usize,
    stopwords: &StopwordList,
) -> Result<SweepResult> {
    let configs = grid(space, n)?;
    let mut leaderboard = Vec::with_capacity(configs.len());
    for config in configs {
        let metrics = evaluate_config(docs, labels, &config, stopwords)?;
        leaderboard.push((config, metrics));
    }
    finish(leaderboard)
}

fn finish(leaderboard: Vec<(YakeConfig, EvalMetrics)>) -> Result<SweepResult> {
    // argmax F1; ties break toward smaller ngram, then window, then method
    // enum order, then threshold, independent of enumeration order
    let best_index = leaderboard
        .iter()
        .enumerate()
        .min_by(|(_, (ca, ma)), (_, (cb, mb))| {
            mb.f1
                .total_cmp(&ma.f1)
                .then_with(|| ca.ngram.cmp(&cb.ngram))
                .then_with(|| ca.window.cmp(&cb.window))
                .then_with(|| ca.dedup_method.cmp(&cb.dedup_method))
                .then_with(|| ca.dedup_threshold.total_cmp(&cb.dedup_threshold))
        })
        .map(|(i, _)| i)
        .expect("non-empty leaderboard");
    let best_f1 = leaderboard[best_index].1.f1;
    let tie_break_applied = leaderboard.iter().filter(|(_, m)| m.f1 == best_f1).count() > 1;
    Ok(SweepResult {
        leaderboard,
        best_index,
        tie_break_applied,
    })
}
