//! Stemmer conformance against the frozen reference vector suite.
//!
//! `data/porter_vectors.tsv` holds word/stem pairs computed with two
//! independently authored open-source implementations of the reference
//! Porter distribution; only pairs on which both agreed were frozen.

use keylab::textprep::stem;

fn vectors() -> Vec<(String, String)> {
    include_str!("data/porter_vectors.tsv")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (word, expected) = l.split_once('\t').expect("word\\tstem line");
            (word.to_string(), expected.to_string())
        })
        .collect()
}

#[test]
fn matches_reference_suite_word_for_word() {
    let vectors = vectors();
    assert!(vectors.len() >= 1000, "suite unexpectedly small: {}", vectors.len());
    let mut failures = Vec::new();
    for (word, expected) in &vectors {
        let got = stem(word);
        if got != *expected {
            failures.push(format!("{word}: expected {expected}, got {got}"));
        }
    }
    assert!(
        failures.is_empty(),
        "{} of {} vectors diverged:\n{}",
        failures.len(),
        vectors.len(),
        failures.join("\n")
    );
}

#[test]
fn table_stems_present_in_suite() {
    let vectors = vectors();
    for (word, expected) in [("genomes", "genom"), ("sequencing", "sequenc")] {
        assert!(
            vectors.iter().any(|(w, s)| w == word && s == expected),
            "{word} -> {expected} missing from suite"
        );
    }
}
