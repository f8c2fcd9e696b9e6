//! Statistical unsupervised keyphrase extraction.
//!
//! Per-word features are computed from casing, sentence position, frequency,
//! window co-occurrence dispersion and sentence spread; candidate phrases
//! (contiguous alphabetic non-stopword runs) score as
//! `S(kw) = prod(S(w)) / (tf * (1 + sum(S(w))))`, lower being better, and
//! the scored list is greedily deduplicated under a similarity threshold.
//!
//! `extract` is a pure function of `(document, config, stopwords)`;
//! corpus-level extraction may fan out per document freely.

mod similarity;

pub use similarity::{similarity, DedupMethod};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::textprep::{stem_phrase, StopwordList, Token};

/// The four extractor hyperparameters plus the output size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YakeConfig {
    /// Longest candidate length in words (1..=3).
    pub ngram: usize,
    /// Co-occurrence window size in tokens (1..=3).
    pub window: usize,
    pub dedup_method: DedupMethod,
    /// Keep a candidate only if its similarity to every kept one is below
    /// this threshold.
    pub dedup_threshold: f64,
    pub top_n: usize,
}

impl Default for YakeConfig {
    fn default() -> Self {
        YakeConfig {
            ngram: 3,
            window: 1,
            dedup_method: DedupMethod::SequenceMatcher,
            dedup_threshold: 0.9,
            top_n: 20,
        }
    }
}

impl YakeConfig {
    /// Check the hyperparameter domains used throughout tuning.
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.ngram) {
            return Err(Error::Config(format!("ngram must be 1..=3, got {}", self.ngram)));
        }
        if !(1..=3).contains(&self.window) {
            return Err(Error::Config(format!("window must be 1..=3, got {}", self.window)));
        }
        if !(self.dedup_threshold > 0.0 && self.dedup_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "dedup_threshold must be in (0, 1], got {}",
                self.dedup_threshold
            )));
        }
        if self.top_n == 0 {
            return Err(Error::Config("top_n must be positive".into()));
        }
        Ok(())
    }
}

/// Per-word statistics and the resulting term score (lower = better).
#[derive(Debug, Clone, PartialEq)]
pub struct TermFeatures {
    pub tf: f64,
    /// Occurrences written fully in capitals (acronym shape, length > 1).
    pub tf_upper: f64,
    /// Capitalized occurrences that are neither sentence-initial nor
    /// acronym-shaped.
    pub tf_proper: f64,
    pub sentence_ids: BTreeSet<usize>,
    pub left_cooccurrences: usize,
    pub left_distinct: usize,
    pub right_cooccurrences: usize,
    pub right_distinct: usize,
    pub casing: f64,
    pub position: f64,
    pub frequency: f64,
    pub relatedness: f64,
    pub different: f64,
    pub score: f64,
}

fn is_acronym_shaped(surface: &str) -> bool {
    surface.chars().count() > 1
        && surface.chars().any(|c| c.is_alphabetic())
        && !surface.chars().any(|c| c.is_lowercase())
}

fn median_of_set(ids: &BTreeSet<usize>) -> f64 {
    let sorted: Vec<usize> = ids.iter().copied().collect();
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    }
}

/// Compute features for every content (non-stopword) word.
///
/// Stopwords are excluded from the feature map but still participate as
/// co-occurrence context. Windows never cross sentence boundaries.
pub fn compute_term_features(
    doc: &Document,
    window: usize,
    stopwords: &StopwordList,
) -> BTreeMap<String, TermFeatures> {
    let total_sentences = doc.total_sentences();
    let mut features: BTreeMap<String, TermFeatures> = BTreeMap::new();
    let mut all_tf: HashMap<&str, usize> = HashMap::new();

    // occurrence pass
    for sentence in &doc.sentences {
        for token in sentence {
            *all_tf.entry(token.lower.as_str()).or_default() += 1;
            if stopwords.contains(&token.lower) {
                continue;
            }
            let entry = features.entry(token.lower.clone()).or_insert_with(|| TermFeatures {
                tf: 0.0,
                tf_upper: 0.0,
                tf_proper: 0.0,
                sentence_ids: BTreeSet::new(),
                left_cooccurrences: 0,
                left_distinct: 0,
                right_cooccurrences: 0,
                right_distinct: 0,
                casing: 0.0,
                position: 0.0,
                frequency: 0.0,
                relatedness: 0.0,
                different: 0.0,
                score: 0.0,
            });
            entry.tf += 1.0;
            entry.sentence_ids.insert(token.sentence);
            if is_acronym_shaped(&token.surface) {
                entry.tf_upper += 1.0;
            } else if token.offset > 0
                && token.surface.chars().next().is_some_and(char::is_uppercase)
            {
                entry.tf_proper += 1.0;
            }
        }
    }
    if features.is_empty() {
        return features;
    }

    // co-occurrence pass: per occurrence, look `window` tokens left/right
    // within the sentence; stopwords count as context
    let mut left_multiset: BTreeMap<String, usize> = BTreeMap::new();
    let mut right_multiset: BTreeMap<String, usize> = BTreeMap::new();
    let mut left_distinct: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut right_distinct: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for sentence in &doc.sentences {
        for (i, token) in sentence.iter().enumerate() {
            if !features.contains_key(&token.lower) {
                continue;
            }
            let lo = i.saturating_sub(window);
            let hi = (i + 1 + window).min(sentence.len());
            for neighbor in &sentence[lo..i] {
                *left_multiset.entry(token.lower.clone()).or_default() += 1;
                left_distinct
                    .entry(token.lower.clone())
                    .or_default()
                    .insert(neighbor.lower.clone());
            }
            for neighbor in &sentence[i + 1..hi] {
                *right_multiset.entry(token.lower.clone()).or_default() += 1;
                right_distinct
                    .entry(token.lower.clone())
                    .or_default()
                    .insert(neighbor.lower.clone());
            }
        }
    }

    let max_tf = all_tf.values().copied().max().unwrap_or(1) as f64;
    let tfs: Vec<f64> = features.values().map(|f| f.tf).collect();
    let mean_tf = tfs.iter().sum::<f64>() / tfs.len() as f64;
    let variance = tfs.iter().map(|t| (t - mean_tf).powi(2)).sum::<f64>() / tfs.len() as f64;
    let std_tf = variance.sqrt();

    for (word, f) in features.iter_mut() {
        f.left_cooccurrences = left_multiset.get(word).copied().unwrap_or(0);
        f.left_distinct = left_distinct.get(word).map_or(0, BTreeSet::len);
        f.right_cooccurrences = right_multiset.get(word).copied().unwrap_or(0);
        f.right_distinct = right_distinct.get(word).map_or(0, BTreeSet::len);

        f.casing = f.tf_upper.max(f.tf_proper) / (1.0 + f.tf.ln());
        f.position = (3.0 + median_of_set(&f.sentence_ids)).ln().ln();
        f.frequency = f.tf / (mean_tf + std_tf);
        let dl = if f.left_cooccurrences == 0 {
            0.0
        } else {
            f.left_distinct as f64 / f.left_cooccurrences as f64
        };
        let dr = if f.right_cooccurrences == 0 {
            0.0
        } else {
            f.right_distinct as f64 / f.right_cooccurrences as f64
        };
        f.relatedness = 1.0 + (dl + dr) * f.tf / max_tf;
        f.different = f.sentence_ids.len() as f64 / total_sentences as f64;
        f.score = (f.relatedness * f.position)
            / (f.casing + f.frequency / f.relatedness + f.different / f.relatedness);
    }

    features
}

/// A candidate phrase with its occurrence count and first position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// Lowercase phrase, words joined with single spaces.
    pub phrase: String,
    pub words: Vec<String>,
    pub tf: usize,
    pub first_sentence: usize,
    pub first_offset: usize,
    pub score: f64,
}

/// All contiguous runs of 1..=ngram tokens within a sentence such that no
/// token is a stopword and every token is purely alphabetic. Candidates are
/// keyed by lowercase phrase and returned in first-occurrence order.
pub fn generate_candidates(
    doc: &Document,
    ngram: usize,
    stopwords: &StopwordList,
) -> Vec<Candidate> {
    let mut order: Vec<Candidate> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let usable = |token: &Token| -> bool {
        !stopwords.contains(&token.lower) && token.lower.chars().all(char::is_alphabetic)
            && !token.lower.is_empty()
    };
    for sentence in &doc.sentences {
        for start in 0..sentence.len() {
            if !usable(&sentence[start]) {
                continue;
            }
            for len in 1..=ngram {
                let end = start + len;
                if end > sentence.len() || !usable(&sentence[end - 1]) {
                    break;
                }
                let words: Vec<String> =
                    sentence[start..end].iter().map(|t| t.lower.clone()).collect();
                let phrase = words.join(" ");
                match index.get(&phrase) {
                    Some(&i) => order[i].tf += 1,
                    None => {
                        index.insert(phrase.clone(), order.len());
                        order.push(Candidate {
                            phrase,
                            words,
                            tf: 1,
                            first_sentence: sentence[start].sentence,
                            first_offset: sentence[start].offset,
                            score: 0.0,
                        });
                    }
                }
            }
        }
    }
    order
}

/// Score candidates and sort ascending (lower = better). Ties break on
/// earlier first occurrence, then lexicographic phrase order.
pub fn score_candidates(
    mut candidates: Vec<Candidate>,
    features: &BTreeMap<String, TermFeatures>,
) -> Vec<Candidate> {
    for candidate in &mut candidates {
        let mut product = 1.0;
        let mut sum = 0.0;
        for word in &candidate.words {
            let score = features.get(word).map(|f| f.score).unwrap_or(0.0);
            product *= score;
            sum += score;
        }
        candidate.score = product / (candidate.tf as f64 * (1.0 + sum));
    }
    candidates.sort_by(|a, b| {
        a.score
            .total_cmp(&b.score)
            .then_with(|| a.first_sentence.cmp(&b.first_sentence))
            .then_with(|| a.first_offset.cmp(&b.first_offset))
            .then_with(|| a.phrase.cmp(&b.phrase))
    });
    candidates
}

/// An extracted keyword. Lower scores are better; ranks start at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyword {
    pub surface: String,
    pub stemmed: String,
    pub score: f64,
    pub rank: usize,
}

/// Greedily keep candidates whose similarity to every kept one is below the
/// threshold, stopping after `top_n`.
pub fn deduplicate_and_take(
    scored: &[Candidate],
    method: DedupMethod,
    threshold: f64,
    top_n: usize,
) -> Vec<Keyword> {
    let mut kept: Vec<&Candidate> = Vec::new();
    for candidate in scored {
        if kept.len() == top_n {
            break;
        }
        let duplicate = kept
            .iter()
            .any(|k| similarity(&candidate.phrase, &k.phrase, method) >= threshold);
        if !duplicate {
            kept.push(candidate);
        }
    }
    kept.iter()
        .enumerate()
        .map(|(i, c)| Keyword {
            surface: c.phrase.clone(),
            stemmed: stem_phrase(&c.phrase),
            score: c.score,
            rank: i + 1,
        })
        .collect()
}

/// Full extraction: features, candidates, scoring, deduplication.
pub fn extract(doc: &Document, config: &YakeConfig, stopwords: &StopwordList) -> Vec<Keyword> {
    let features = compute_term_features(doc, config.window, stopwords);
    let candidates = generate_candidates(doc, config.ngram, stopwords);
    let scored = score_candidates(candidates, &features);
    deduplicate_and_take(&scored, config.dedup_method, config.dedup_threshold, config.top_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use crate::textprep::CuratedTermList;

    fn doc(text: &str) -> Document {
        Document::build(1, text.to_string(), &CuratedTermList::empty())
    }

    fn stops() -> &'static StopwordList {
        StopwordList::default_english()
    }

    #[test]
    fn single_sentence_features() {
        let d = doc("alpha beta alpha");
        let features = compute_term_features(&d, 1, stops());
        let alpha = &features["alpha"];
        assert_eq!(alpha.tf, 2.0);
        assert_eq!(alpha.different, 1.0);
        assert!((alpha.position - (3.0_f64).ln().ln()).abs() < 1e-10);
        assert!((alpha.position - 0.0940).abs() < 5e-5);
    }

    #[test]
    fn lowercase_once_word_has_zero_casing() {
        let d = doc("plain beta gamma");
        let features = compute_term_features(&d, 1, stops());
        assert_eq!(features["plain"].casing, 0.0);
    }

    #[test]
    fn acronym_and_proper_counters() {
        let d = doc("Soil DNA from Amanita\nthe DNA of Amanita");
        let features = compute_term_features(&d, 1, stops());
        assert_eq!(features["dna"].tf_upper, 2.0);
        assert_eq!(features["dna"].tf_proper, 0.0);
        // sentence-initial "Soil" does not count as proper
        assert_eq!(features["soil"].tf_proper, 0.0);
        // "Amanita" is capitalized mid-sentence in both sentences
        assert_eq!(features["amanita"].tf_proper, 2.0);
    }

    #[test]
    fn empty_document_has_no_features() {
        let d = doc("");
        assert!(compute_term_features(&d, 2, stops()).is_empty());
    }

    #[test]
    fn score_positive_whenever_sentences_exist() {
        let d = doc("Genome assembly of soil fungi. Fungi degrade cellulose in soil.");
        let features = compute_term_features(&d, 2, stops());
        assert!(!features.is_empty());
        for (word, f) in &features {
            assert!(f.score > 0.0, "S({word}) = {}", f.score);
        }
    }

    #[test]
    fn ngram_one_yields_only_unigrams() {
        let d = doc("soil carbon cycling");
        let candidates = generate_candidates(&d, 1, stops());
        assert!(candidates.iter().all(|c| c.words.len() == 1));
        assert_eq!(candidates.len(), 3);
    }

    #[test]
    fn stopword_trigram_is_excluded() {
        let d = doc("evolution of symbiosis");
        let candidates = generate_candidates(&d, 3, stops());
        let phrases: Vec<&str> = candidates.iter().map(|c| c.phrase.as_str()).collect();
        assert_eq!(phrases, ["evolution", "symbiosis"]);
    }

    #[test]
    fn empty_document_has_no_candidates() {
        assert!(generate_candidates(&doc(""), 3, stops()).is_empty());
    }

    #[test]
    fn nonalphabetic_tokens_are_not_candidates() {
        let d = doc("the 16S rRNA gene and dna-based methods");
        let candidates = generate_candidates(&d, 1, stops());
        let phrases: Vec<&str> = candidates.iter().map(|c| c.phrase.as_str()).collect();
        assert!(phrases.contains(&"rrna"));
        assert!(phrases.contains(&"gene"));
        assert!(!phrases.contains(&"16s"));
        assert!(!phrases.contains(&"dna-based"));
    }

    #[test]
    fn unigram_score_specialization() {
        let d = doc("Genome assembly of soil fungi. Fungi degrade cellulose in soil.");
        let features = compute_term_features(&d, 2, stops());
        let candidates = generate_candidates(&d, 1, stops());
        let scored = score_candidates(candidates, &features);
        for c in &scored {
            let s = features[&c.phrase].score;
            let expected = s / (c.tf as f64 * (1.0 + s));
            assert!((c.score - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_scores_order_by_first_occurrence() {
        // two words with symmetric roles score identically; the earlier wins
        let d = doc("alpha beta\nbeta alpha");
        let features = compute_term_features(&d, 1, stops());
        let scored = score_candidates(generate_candidates(&d, 1, stops()), &features);
        assert_eq!(scored[0].phrase, "alpha");
        assert_eq!(scored[1].phrase, "beta");
        assert!((scored[0].score - scored[1].score).abs() < 1e-15);
    }

    #[test]
    fn dedup_drops_near_duplicates_at_low_threshold() {
        let scored = vec![
            Candidate {
                phrase: "genome".into(),
                words: vec!["genome".into()],
                tf: 1,
                first_sentence: 0,
                first_offset: 0,
                score: 0.1,
            },
            Candidate {
                phrase: "genomes".into(),
                words: vec!["genomes".into()],
                tf: 1,
                first_sentence: 0,
                first_offset: 1,
                score: 0.2,
            },
            Candidate {
                phrase: "soil".into(),
                words: vec!["soil".into()],
                tf: 1,
                first_sentence: 0,
                first_offset: 2,
                score: 0.3,
            },
        ];
        for method in DedupMethod::ALL {
            let kept = deduplicate_and_take(&scored, method, 0.6, 20);
            let surfaces: Vec<&str> = kept.iter().map(|k| k.surface.as_str()).collect();
            assert_eq!(surfaces, ["genome", "soil"], "{method:?}");
        }
        // higher thresholds keep at least as much on this input
        let mut previous = 0;
        for threshold in [0.6, 0.7, 0.8, 0.9, 0.95] {
            let kept =
                deduplicate_and_take(&scored, DedupMethod::Levenshtein, threshold, 20).len();
            assert!(kept >= previous);
            previous = kept;
        }
    }

    #[test]
    fn truncation_is_a_noop_when_fewer_candidates() {
        let scored = vec![Candidate {
            phrase: "soil".into(),
            words: vec!["soil".into()],
            tf: 1,
            first_sentence: 0,
            first_offset: 0,
            score: 0.5,
        }];
        let kept = deduplicate_and_take(&scored, DedupMethod::Levenshtein, 0.9, 20);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].rank, 1);
    }

    #[test]
    fn extract_is_deterministic_and_honors_bounds() {
        let d = doc(
            "Halorespiring bacteria in contaminated sediments. \
             Genome sequencing of halorespiring bacteria reveals dehalogenase genes. \
             Soil carbon cycling interacts with microbial diversity.",
        );
        let config = YakeConfig {
            ngram: 2,
            window: 2,
            dedup_method: DedupMethod::JaroWinkler,
            dedup_threshold: 0.8,
            top_n: 5,
        };
        let a = extract(&d, &config, stops());
        let b = extract(&d, &config, stops());
        assert_eq!(a, b);
        assert!(a.len() <= 5);
        assert!(!a.is_empty());
        for (i, keyword) in a.iter().enumerate() {
            assert!(keyword.surface.split(' ').count() <= 2);
            assert_eq!(keyword.rank, i + 1);
            assert!(keyword.score > 0.0);
            assert_eq!(keyword.stemmed, stem_phrase(&keyword.surface));
        }
        // dedup contract: pairwise similarity below threshold
        for i in 0..a.len() {
            for j in 0..i {
                let s = similarity(&a[i].surface, &a[j].surface, config.dedup_method);
                assert!(s < config.dedup_threshold, "{} vs {}: {s}", a[i].surface, a[j].surface);
            }
        }
    }

    #[test]
    fn ngram_one_extract_returns_unigrams() {
        let d = doc("Genome sequencing of soil fungi and soil bacteria.");
        let config = YakeConfig {
            ngram: 1,
            top_n: 10,
            ..YakeConfig::default()
        };
        let keywords = extract(&d, &config, stops());
        assert!(keywords.iter().all(|k| !k.surface.contains(' ')));
    }

    #[test]
    fn config_validation() {
        assert!(YakeConfig::default().validate().is_ok());
        assert!(YakeConfig { ngram: 0, ..YakeConfig::default() }.validate().is_err());
        assert!(YakeConfig { window: 9, ..YakeConfig::default() }.validate().is_err());
        assert!(YakeConfig { dedup_threshold: 0.0, ..YakeConfig::default() }.validate().is_err());
        assert!(YakeConfig { top_n: 0, ..YakeConfig::default() }.validate().is_err());
    }
}
