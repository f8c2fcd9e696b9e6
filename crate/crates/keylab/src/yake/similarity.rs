//! String similarity metrics used for keyword deduplication.
//!
//! All three return values in `[0, 1]`. Empty-string convention: similarity
//! is 0 unless both strings are empty (then 1).

use serde::{Deserialize, Serialize};

/// Deduplication metric. Enum order is the tie-break order used by sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DedupMethod {
    Levenshtein,
    SequenceMatcher,
    JaroWinkler,
}

impl DedupMethod {
    pub const ALL: [DedupMethod; 3] = [
        DedupMethod::Levenshtein,
        DedupMethod::SequenceMatcher,
        DedupMethod::JaroWinkler,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DedupMethod::Levenshtein => "levenshtein",
            DedupMethod::SequenceMatcher => "sequence_matcher",
            DedupMethod::JaroWinkler => "jaro_winkler",
        }
    }
}

impl std::str::FromStr for DedupMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "levenshtein" => Ok(DedupMethod::Levenshtein),
            "sequence_matcher" => Ok(DedupMethod::SequenceMatcher),
            "jaro_winkler" => Ok(DedupMethod::JaroWinkler),
            other => Err(format!("unknown dedup method {other:?}")),
        }
    }
}

/// Similarity of two lowercase strings under the chosen method.
pub fn similarity(a: &str, b: &str, method: DedupMethod) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 1.0 } else { 0.0 };
    }
    match method {
        DedupMethod::Levenshtein => levenshtein_similarity(a, b),
        DedupMethod::SequenceMatcher => sequence_matcher_ratio(a, b),
        DedupMethod::JaroWinkler => jaro_winkler(a, b),
    }
}

/// `1 - editDistance / max(|a|, |b|)` over characters.
fn levenshtein_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let distance = levenshtein_distance(&a, &b);
    1.0 - distance as f64 / a.len().max(b.len()) as f64
}

fn levenshtein_distance(a: &[char], b: &[char]) -> usize {
    let mut previous: Vec<usize> = (0..=b.len()).collect();
    let mut current = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        current[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = previous[j] + usize::from(ca != cb);
            current[j + 1] = substitution.min(previous[j + 1] + 1).min(current[j] + 1);
        }
        std::mem::swap(&mut previous, &mut current);
    }
    previous[b.len()]
}

/// `2 * M / (|a| + |b|)` where M is the total size of the longest common
/// blocks found recursively (largest block first, then left and right of
/// it), matching the classic sequence-matcher formulation without junk
/// heuristics.
fn sequence_matcher_ratio(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let matched = matching_total(&a, &b, 0, a.len(), 0, b.len());
    2.0 * matched as f64 / (a.len() + b.len()) as f64
}

fn matching_total(a: &[char], b: &[char], alo: usize, ahi: usize, blo: usize, bhi: usize) -> usize {
    let (i, j, size) = longest_match(a, b, alo, ahi, blo, bhi);
    if size == 0 {
        return 0;
    }
    size + matching_total(a, b, alo, i, blo, j) + matching_total(a, b, i + size, ahi, j + size, bhi)
}

/// Longest common block of `a[alo..ahi]` and `b[blo..bhi]`; ties resolve to
/// the earliest start in `a`, then in `b`.
fn longest_match(
    a: &[char],
    b: &[char],
    alo: usize,
    ahi: usize,
    blo: usize,
    bhi: usize,
) -> (usize, usize, usize) {
    let mut best = (alo, blo, 0usize);
    if alo >= ahi || blo >= bhi {
        return best;
    }
    let width = bhi - blo;
    let mut prev = vec![0usize; width + 1];
    let mut row = vec![0usize; width + 1];
    for i in alo..ahi {
        for j in blo..bhi {
            let k = if a[i] == b[j] { prev[j - blo] + 1 } else { 0 };
            row[j - blo + 1] = k;
            if k > best.2 {
                best = (i + 1 - k, j + 1 - k, k);
            }
        }
        std::mem::swap(&mut prev, &mut row);
        row[0] = 0;
    }
    best
}

/// Jaro similarity with the Winkler common-prefix boost (scaling 0.1,
/// prefix capped at 4 characters).
fn jaro_winkler(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let jaro = jaro_similarity(&a, &b);
    let prefix = a.iter().zip(&b).take(4).take_while(|(x, y)| x == y).count();
    (jaro + prefix as f64 * 0.1 * (1.0 - jaro)).min(1.0)
}

fn jaro_similarity(a: &[char], b: &[char]) -> f64 {
    if a == b {
        return 1.0;
    }
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut a_matched = vec![false; a.len()];
    let mut b_matched = vec![false; b.len()];
    let mut matches = 0usize;
    for (i, ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_matched[j] && *ca == b[j] {
                a_matched[i] = true;
                b_matched[j] = true;
                matches += 1;
                break;
            }
        }
    }
    if matches == 0 {
        return 0.0;
    }
    let mut transpositions = 0usize;
    let mut j = 0usize;
    for (i, &matched) in a_matched.iter().enumerate() {
        if !matched {
            continue;
        }
        while !b_matched[j] {
            j += 1;
        }
        if a[i] != b[j] {
            transpositions += 1;
        }
        j += 1;
    }
    let m = matches as f64;
    (m / a.len() as f64 + m / b.len() as f64 + (m - transpositions as f64 / 2.0) / m) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_strings_are_1_under_every_method() {
        for method in DedupMethod::ALL {
            assert_eq!(similarity("genome", "genome", method), 1.0, "{method:?}");
        }
    }

    #[test]
    fn empty_string_convention() {
        for method in DedupMethod::ALL {
            assert_eq!(similarity("", "", method), 1.0);
            assert_eq!(similarity("a", "", method), 0.0);
            assert_eq!(similarity("", "a", method), 0.0);
        }
    }

    #[test]
    fn levenshtein_analytic_example() {
        let s = similarity("abc", "abd", DedupMethod::Levenshtein);
        assert!((s - (1.0 - 1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn jaro_winkler_reference_pair() {
        let s = similarity("martha", "marhta", DedupMethod::JaroWinkler);
        assert!((s - 0.9611).abs() < 5e-5, "got {s}");
    }

    #[test]
    fn sequence_matcher_classic_ratio() {
        let s = similarity("abcd", "bcde", DedupMethod::SequenceMatcher);
        assert!((s - 0.75).abs() < 1e-12);
    }

    #[test]
    fn sequence_matcher_recurses_into_side_blocks() {
        // blocks: "ab" left of the q/z mismatch, then "cd"
        let s = similarity("abqcd", "abzcd", DedupMethod::SequenceMatcher);
        assert!((s - 0.8).abs() < 1e-12);
    }

    #[test]
    fn near_duplicate_words_score_high() {
        for method in DedupMethod::ALL {
            let s = similarity("genome", "genomes", method);
            assert!(s >= 0.6, "{method:?} gave {s}");
        }
    }

    #[test]
    fn method_names_round_trip() {
        for method in DedupMethod::ALL {
            let parsed: DedupMethod = method.name().parse().unwrap();
            assert_eq!(parsed, method);
        }
    }
}
