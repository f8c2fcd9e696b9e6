//! Config-driven orchestration of the full pipeline.
//!
//! One TOML config file drives every command; intermediate artifacts are
//! line-delimited records in the output directory, so stages compose in any
//! order that respects `prepare -> (link-labels | onto-labels) -> extract ->
//! evaluate`, and rerunning a command on unchanged inputs rewrites
//! byte-identical outputs.

pub mod artifacts;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{self, Document, FieldMap};
use crate::error::{Error, Result};
use crate::eval::{compute_metrics, exact_match, macro_average};
use crate::linkage::{self, KeywordStore, LabelSet};
use crate::ontoannot::{self, BranchAllowlist, MatchedTerm};
use crate::textprep::{CuratedTermList, StopwordList};
use crate::tune::{self, SweepSpace};
use crate::yake::{self, DedupMethod, YakeConfig};
use crate::ProposalId;

pub use artifacts::{KeywordRecord, PerDocumentMetrics};

/// Pipeline commands, in upstream-to-downstream order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Prepare,
    LinkLabels,
    OntoLabels,
    Extract,
    Evaluate,
    Tune,
    Report,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Prepare,
        Command::LinkLabels,
        Command::OntoLabels,
        Command::Extract,
        Command::Evaluate,
        Command::Tune,
        Command::Report,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Prepare => "prepare",
            Command::LinkLabels => "link-labels",
            Command::OntoLabels => "onto-labels",
            Command::Extract => "extract",
            Command::Evaluate => "evaluate",
            Command::Tune => "tune",
            Command::Report => "report",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Command::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

/// Which label file downstream stages consume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LabelSource {
    #[default]
    Linkage,
    Ontology,
}

impl LabelSource {
    pub fn name(&self) -> &'static str {
        match self {
            LabelSource::Linkage => "linkage",
            LabelSource::Ontology => "ontology",
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InputsConfig {
    pub proposals: Option<PathBuf>,
    pub publications: Option<PathBuf>,
    pub keyword_store: Option<PathBuf>,
    pub dictionary: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub curated_terms: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OntologyConfig {
    /// `ontology -> [branches]`; empty list excludes the ontology, `*`
    /// admits all branches.
    pub branch_allowlist: BTreeMap<String, BTreeSet<String>>,
    /// Baseline DF threshold used by `onto-labels`.
    pub df_threshold: f64,
    /// Thresholds rendered in the report's sweep table.
    pub df_thresholds: Vec<f64>,
}

impl Default for OntologyConfig {
    fn default() -> Self {
        OntologyConfig {
            branch_allowlist: BTreeMap::new(),
            df_threshold: 0.01,
            df_thresholds: vec![0.01, 0.02, 0.05, 0.10, 0.20, 0.25, 0.50, 1.00],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluateConfig {
    pub cutoffs: Vec<usize>,
    pub labels: LabelSource,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        EvaluateConfig {
            cutoffs: vec![5, 10, 20],
            labels: LabelSource::Linkage,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuneConfig {
    pub ngrams: Vec<usize>,
    pub windows: Vec<usize>,
    pub dedup_methods: Vec<DedupMethod>,
    pub dedup_thresholds: Vec<f64>,
    pub labels: Option<LabelSource>,
}

impl Default for TuneConfig {
    fn default() -> Self {
        let space = SweepSpace::default();
        TuneConfig {
            ngrams: space.ngrams,
            windows: space.windows,
            dedup_methods: space.dedup_methods,
            dedup_thresholds: space.dedup_thresholds,
            labels: None,
        }
    }
}

impl TuneConfig {
    pub fn space(&self) -> SweepSpace {
        SweepSpace {
            ngrams: self.ngrams.clone(),
            windows: self.windows.clone(),
            dedup_methods: self.dedup_methods.clone(),
            dedup_thresholds: self.dedup_thresholds.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("build/run"),
        }
    }
}

/// The single config file driving every command.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub inputs: InputsConfig,
    pub corpus: CorpusConfig,
    pub ontology: OntologyConfig,
    pub extract: ExtractConfig,
    pub evaluate: EvaluateConfig,
    pub tune: TuneConfig,
    pub output: OutputConfig,
    /// Reserved for randomized fixture generation; the shipped commands are
    /// fully deterministic and ignore it.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusConfig {
    pub id_column: String,
    pub semantic_fields: Vec<String>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        let map = FieldMap::default();
        CorpusConfig {
            id_column: map.id_column,
            semantic_fields: map.semantic_fields,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractConfig {
    pub ngram: usize,
    pub window: usize,
    pub dedup_method: DedupMethod,
    pub dedup_threshold: f64,
    pub top_n: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        let config = YakeConfig::default();
        ExtractConfig {
            ngram: config.ngram,
            window: config.window,
            dedup_method: config.dedup_method,
            dedup_threshold: config.dedup_threshold,
            top_n: config.top_n,
        }
    }
}

impl ExtractConfig {
    pub fn yake(&self) -> YakeConfig {
        YakeConfig {
            ngram: self.ngram,
            window: self.window,
            dedup_method: self.dedup_method,
            dedup_threshold: self.dedup_threshold,
            top_n: self.top_n,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let content = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: PipelineConfig = toml::from_str(&content)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        // input paths are relative to the config file's directory
        if let Some(base) = path.parent() {
            config.rebase(base);
        }
        Ok(config)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&path);
                }
            }
        };
        fix(&mut self.inputs.proposals);
        fix(&mut self.inputs.publications);
        fix(&mut self.inputs.keyword_store);
        fix(&mut self.inputs.dictionary);
        fix(&mut self.inputs.stopwords);
        fix(&mut self.inputs.curated_terms);
        if self.output.dir.is_relative() {
            self.output.dir = base.join(&self.output.dir);
        }
    }

    /// Field-level validation for one command. Referenced input files must
    /// exist; value domains are checked eagerly.
    pub fn validate(&self, command: Command) -> Result<()> {
        let need = |field: &str, path: &Option<PathBuf>| -> Result<()> {
            match path {
                None => Err(Error::Config(format!(
                    "inputs.{field} is required for `{}`",
                    command.name()
                ))),
                Some(p) if !p.exists() => Err(Error::Config(format!(
                    "inputs.{field}: no such file {}",
                    p.display()
                ))),
                Some(_) => Ok(()),
            }
        };
        let optional = |field: &str, path: &Option<PathBuf>| -> Result<()> {
            match path {
                Some(p) if !p.exists() => Err(Error::Config(format!(
                    "inputs.{field}: no such file {}",
                    p.display()
                ))),
                _ => Ok(()),
            }
        };
        optional("stopwords", &self.inputs.stopwords)?;
        optional("curated_terms", &self.inputs.curated_terms)?;

        if self.evaluate.cutoffs.is_empty() || self.evaluate.cutoffs.contains(&0) {
            return Err(Error::Config("evaluate.cutoffs must be positive".into()));
        }
        if !(self.ontology.df_threshold > 0.0 && self.ontology.df_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "ontology.df_threshold must be in (0, 1], got {}",
                self.ontology.df_threshold
            )));
        }
        for t in &self.ontology.df_thresholds {
            if !(*t > 0.0 && *t <= 1.0) {
                return Err(Error::Config(format!(
                    "ontology.df_thresholds entries must be in (0, 1], got {t}"
                )));
            }
        }

        match command {
            Command::Prepare => need("proposals", &self.inputs.proposals),
            Command::LinkLabels => {
                need("proposals", &self.inputs.proposals)?;
                need("publications", &self.inputs.publications)?;
                need("keyword_store", &self.inputs.keyword_store)
            }
            Command::OntoLabels => need("dictionary", &self.inputs.dictionary),
            Command::Extract => self.extract.yake().validate(),
            Command::Evaluate => Ok(()),
            Command::Tune => {
                if self.tune.ngrams.is_empty()
                    || self.tune.windows.is_empty()
                    || self.tune.dedup_methods.is_empty()
                    || self.tune.dedup_thresholds.is_empty()
                {
                    return Err(Error::Config("tune space has an empty parameter list".into()));
                }
                Ok(())
            }
            Command::Report => need("dictionary", &self.inputs.dictionary),
        }
    }

    fn artifact(&self, name: &str) -> PathBuf {
        self.output.dir.join(name)
    }

    fn stopwords(&self) -> Result<StopwordList> {
        match &self.inputs.stopwords {
            Some(path) => StopwordList::from_path(path),
            None => Ok(StopwordList::default_english().clone()),
        }
    }

    fn curated_terms(&self) -> Result<CuratedTermList> {
        match &self.inputs.curated_terms {
            Some(path) => CuratedTermList::from_path(path),
            None => Ok(CuratedTermList::empty()),
        }
    }

    fn allowlist(&self) -> BranchAllowlist {
        BranchAllowlist(self.ontology.branch_allowlist.clone())
    }

    fn labels_path(&self, source: LabelSource) -> PathBuf {
        self.artifact(&format!("labels_{}.jsonl", source.name()))
    }
}

/// Validate the config and execute one command.
pub fn run(command: Command, config: &PipelineConfig) -> Result<()> {
    config.validate(command)?;
    std::fs::create_dir_all(&config.output.dir).map_err(|source| Error::Io {
        path: config.output.dir.clone(),
        source,
    })?;
    match command {
        Command::Prepare => prepare(config),
        Command::LinkLabels => link_labels(config),
        Command::OntoLabels => onto_labels(config),
        Command::Extract => extract(config),
        Command::Evaluate => evaluate(config),
        Command::Tune => tune_command(config),
        Command::Report => report::render(config),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct PrepareReport {
    rows: usize,
    loaded: usize,
    skipped_bad_id: usize,
    skippable_documents: Vec<ProposalId>,
}

fn field_map(config: &PipelineConfig) -> FieldMap {
    FieldMap {
        id_column: config.corpus.id_column.clone(),
        semantic_fields: config.corpus.semantic_fields.clone(),
    }
}

fn prepare(config: &PipelineConfig) -> Result<()> {
    let map = field_map(config);
    let proposals_path = config.inputs.proposals.as_ref().unwrap();
    let (records, load_report) = corpus::load_proposals(proposals_path, &map)?;
    let curated = config.curated_terms()?;
    let documents: Vec<Document> = records
        .iter()
        .map(|record| {
            let blob = corpus::assemble_text(record, &map.semantic_fields);
            Document::build(record.proposal_id, blob, &curated)
        })
        .collect();
    let skippable: Vec<ProposalId> = documents
        .iter()
        .filter(|d| d.is_skippable())
        .map(|d| d.proposal_id)
        .collect();
    artifacts::write_jsonl(&config.artifact("documents.jsonl"), &documents)?;
    artifacts::write_json_pretty(
        &config.artifact("prepare_report.json"),
        &PrepareReport {
            rows: load_report.rows,
            loaded: load_report.loaded,
            skipped_bad_id: load_report.skipped_bad_id,
            skippable_documents: skippable,
        },
    )
}

fn load_documents(config: &PipelineConfig) -> Result<Vec<Document>> {
    artifacts::read_jsonl(&config.artifact("documents.jsonl"))
}

#[derive(Debug, Serialize, Deserialize)]
struct LinkLabelsReport {
    proposals: usize,
    publications: usize,
    publication_rows_skipped: usize,
    proposals_with_publications: usize,
    linked_publications: usize,
    orphaned_publications: Vec<String>,
    store_publications: usize,
    publications_missing_from_store: usize,
    total_labels: usize,
}

fn link_labels(config: &PipelineConfig) -> Result<()> {
    let documents = load_documents(config)?;
    let map = field_map(config);
    let (proposals, _) = corpus::load_proposals(config.inputs.proposals.as_ref().unwrap(), &map)?;
    let (publications, pub_report) =
        corpus::load_publications(config.inputs.publications.as_ref().unwrap())?;
    let store = KeywordStore::load(config.inputs.keyword_store.as_ref().unwrap())?;

    let (by_proposal, link_report) = linkage::link(&proposals, &publications);
    let mut label_sets = Vec::new();
    let mut missing_total = 0usize;
    for doc in &documents {
        if doc.is_skippable() {
            continue;
        }
        let publication_ids: Vec<String> = by_proposal
            .get(&doc.proposal_id)
            .map(|pubs| pubs.iter().map(|p| p.publication_id.clone()).collect())
            .unwrap_or_default();
        let (keywords, missing) = linkage::collect_keywords(&publication_ids, &store);
        missing_total += missing;
        label_sets.push(linkage::filter_present(&keywords, doc));
    }
    let total_labels: usize = label_sets.iter().map(LabelSet::len).sum();
    artifacts::write_jsonl(&config.labels_path(LabelSource::Linkage), &label_sets)?;
    artifacts::write_json_pretty(
        &config.artifact("link_report.json"),
        &LinkLabelsReport {
            proposals: proposals.len(),
            publications: publications.len(),
            publication_rows_skipped: pub_report.skipped_bad_id,
            proposals_with_publications: link_report.proposals_with_publications,
            linked_publications: link_report.linked_publications,
            orphaned_publications: link_report.orphaned,
            store_publications: store.publications(),
            publications_missing_from_store: missing_total,
            total_labels,
        },
    )
}

#[derive(Debug, Serialize, Deserialize)]
struct OntoLabelsReport {
    dictionary_rows: usize,
    dictionary_indexed: usize,
    excluded_by_branch: usize,
    malformed_rows: usize,
    duplicate_stems: usize,
    documents: usize,
    total_matches: usize,
    matches_after_short_filter: usize,
    df_threshold: f64,
    total_labels: usize,
}

/// Matches and DF table for the non-skippable documents, shared by
/// `onto-labels` and the report's threshold sweep.
fn ontology_matches(
    config: &PipelineConfig,
    documents: &[Document],
) -> Result<(Vec<(ProposalId, Vec<MatchedTerm>)>, ontoannot::DfTable, ontoannot::DictLoadReport, usize)>
{
    let allowlist = config.allowlist();
    let (dict, dict_report) =
        ontoannot::load_dictionary(config.inputs.dictionary.as_ref().unwrap(), &allowlist)?;
    let mut total_matches = 0usize;
    let per_doc: Vec<(ProposalId, Vec<MatchedTerm>)> = documents
        .iter()
        .filter(|d| !d.is_skippable())
        .map(|doc| {
            let raw = ontoannot::annotate(doc, &dict);
            total_matches += raw.len();
            (doc.proposal_id, ontoannot::filter_short(raw))
        })
        .collect();
    let stem_sets: Vec<BTreeSet<String>> = per_doc
        .iter()
        .map(|(_, matches)| matches.iter().map(|m| m.stemmed.clone()).collect())
        .collect();
    let df = ontoannot::build_df(&stem_sets);
    Ok((per_doc, df, dict_report, total_matches))
}

fn onto_labels(config: &PipelineConfig) -> Result<()> {
    let documents = load_documents(config)?;
    let (per_doc, df, dict_report, total_matches) = ontology_matches(config, &documents)?;
    let threshold = config.ontology.df_threshold;
    let mut label_sets = Vec::new();
    for (proposal_id, matches) in &per_doc {
        label_sets.push(ontoannot::apply_threshold(matches, &df, threshold, *proposal_id)?);
    }
    let total_labels: usize = label_sets.iter().map(LabelSet::len).sum();
    artifacts::write_jsonl(&config.labels_path(LabelSource::Ontology), &label_sets)?;
    artifacts::write_json_pretty(&config.artifact("df_table.json"), &df)?;
    artifacts::write_json_pretty(
        &config.artifact("onto_report.json"),
        &OntoLabelsReport {
            dictionary_rows: dict_report.rows,
            dictionary_indexed: dict_report.indexed,
            excluded_by_branch: dict_report.excluded_by_branch,
            malformed_rows: dict_report.malformed,
            duplicate_stems: dict_report.duplicate_stems,
            documents: per_doc.len(),
            total_matches,
            matches_after_short_filter: per_doc.iter().map(|(_, m)| m.len()).sum(),
            df_threshold: threshold,
            total_labels,
        },
    )
}

fn extract(config: &PipelineConfig) -> Result<()> {
    let documents = load_documents(config)?;
    let stopwords = config.stopwords()?;
    let yake_config = config.extract.yake();
    let records: Vec<KeywordRecord> = documents
        .par_iter()
        .filter(|d| !d.is_skippable())
        .map(|doc| KeywordRecord {
            proposal_id: doc.proposal_id,
            keywords: yake::extract(doc, &yake_config, &stopwords),
        })
        .collect();
    artifacts::write_jsonl(&config.artifact("keywords.jsonl"), &records)
}

fn read_labels(config: &PipelineConfig, source: LabelSource) -> Result<BTreeMap<ProposalId, LabelSet>> {
    let sets: Vec<LabelSet> = artifacts::read_jsonl(&config.labels_path(source))?;
    Ok(sets.into_iter().map(|s| (s.proposal_id, s)).collect())
}

fn evaluate(config: &PipelineConfig) -> Result<()> {
    let keywords: Vec<KeywordRecord> = artifacts::read_jsonl(&config.artifact("keywords.jsonl"))?;
    let labels = read_labels(config, config.evaluate.labels)?;
    let source = config.evaluate.labels.name();

    let mut summary_rows = Vec::new();
    let mut summary_metrics = Vec::new();
    let mut per_document_rows = Vec::new();
    for &n in &config.evaluate.cutoffs {
        let mut per_document = Vec::new();
        for record in &keywords {
            let Some(label_set) = labels.get(&record.proposal_id) else {
                continue;
            };
            if label_set.is_empty() {
                continue;
            }
            let top: Vec<yake::Keyword> =
                record.keywords.iter().filter(|k| k.rank <= n).cloned().collect();
            let (matched, _) = exact_match(&top, label_set);
            let metrics = compute_metrics(matched, top.len(), label_set.len(), n)?;
            per_document.push(PerDocumentMetrics {
                proposal_id: record.proposal_id,
                metrics,
            });
        }
        let corpus_metrics =
            macro_average(&per_document.iter().map(|p| p.metrics.clone()).collect::<Vec<_>>())?;
        summary_rows.push(vec![
            n.to_string(),
            format!("{:.6}", corpus_metrics.precision),
            format!("{:.6}", corpus_metrics.recall),
            format!("{:.6}", corpus_metrics.f1),
        ]);
        summary_metrics.push(corpus_metrics);
        per_document_rows.extend(per_document);
    }
    artifacts::write_csv(
        &config.artifact(&format!("metrics_{source}.csv")),
        &["cutoff", "precision", "recall", "f1"],
        &summary_rows,
    )?;
    artifacts::write_jsonl(&config.artifact(&format!("metrics_{source}.jsonl")), &summary_metrics)?;
    artifacts::write_jsonl(
        &config.artifact(&format!("metrics_{source}_per_doc.jsonl")),
        &per_document_rows,
    )
}

#[derive(Debug, Serialize, Deserialize)]
struct WinnerRow {
    cutoff: usize,
    ngram: usize,
    window: usize,
    dedup_method: DedupMethod,
    dedup_threshold: f64,
    precision: f64,
    recall: f64,
    f1: f64,
    tie_break_applied: bool,
}

fn tune_command(config: &PipelineConfig) -> Result<()> {
    let documents = load_documents(config)?;
    let source = config.tune.labels.unwrap_or(config.evaluate.labels);
    let labels = read_labels(config, source)?;
    let stopwords = config.stopwords()?;
    let space = config.tune.space();

    let mut winners = Vec::new();
    for &n in &config.evaluate.cutoffs {
        let result = tune::sweep(&documents, &labels, &space, n, &stopwords)?;
        let rows: Vec<Vec<String>> = result
            .leaderboard
            .iter()
            .map(|(cfg, m)| {
                vec![
                    cfg.ngram.to_string(),
                    cfg.window.to_string(),
                    cfg.dedup_method.name().to_string(),
                    format!("{}", cfg.dedup_threshold),
                    n.to_string(),
                    format!("{:.6}", m.precision),
                    format!("{:.6}", m.recall),
                    format!("{:.6}", m.f1),
                ]
            })
            .collect();
        artifacts::write_csv(
            &config.artifact(&format!("leaderboard_{n}.csv")),
            &[
                "ngram",
                "window",
                "dedup_method",
                "dedup_threshold",
                "cutoff",
                "precision",
                "recall",
                "f1",
            ],
            &rows,
        )?;
        let (best_config, best_metrics) = result.best();
        winners.push(WinnerRow {
            cutoff: n,
            ngram: best_config.ngram,
            window: best_config.window,
            dedup_method: best_config.dedup_method,
            dedup_threshold: best_config.dedup_threshold,
            precision: best_metrics.precision,
            recall: best_metrics.recall,
            f1: best_metrics.f1,
            tie_break_applied: result.tie_break_applied,
        });
    }
    let winner_rows: Vec<Vec<String>> = winners
        .iter()
        .map(|w| {
            vec![
                w.cutoff.to_string(),
                w.ngram.to_string(),
                w.window.to_string(),
                w.dedup_method.name().to_string(),
                format!("{}", w.dedup_threshold),
                format!("{:.6}", w.precision),
                format!("{:.6}", w.recall),
                format!("{:.6}", w.f1),
                w.tie_break_applied.to_string(),
            ]
        })
        .collect();
    artifacts::write_csv(
        &config.artifact("winners.csv"),
        &[
            "cutoff",
            "ngram",
            "window",
            "dedup_method",
            "dedup_threshold",
            "precision",
            "recall",
            "f1",
            "tie_break_applied",
        ],
        &winner_rows,
    )?;
    artifacts::write_jsonl(&config.artifact("winners.jsonl"), &winners)
}
