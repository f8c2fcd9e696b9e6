//! Text preparation: sanitization, segmentation, stopwords and stemming.
//!
//! Everything here is a pure function over immutable inputs. The sanitize /
//! segment pair uses `'\n'` as the sentence-break marker: newlines already
//! present in the input (e.g. field boundaries from blob assembly) are kept
//! as breaks, and sentence-final punctuation is converted into new breaks so
//! segmentation survives punctuation removal.

mod porter;

pub use porter::stem;

use std::collections::BTreeSet;
use std::path::Path;

use once_cell::sync::Lazy;
use regex::Regex;

use crate::error::{Error, Result};

/// Sentence-break marker used in sanitized text.
pub const SENTENCE_BREAK: char = '\n';

/// A token of a segmented document.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Token {
    /// Surface form as it appears in the sanitized text.
    pub surface: String,
    /// Lowercased surface form.
    pub lower: String,
    /// Porter stem of the lowercased form.
    pub stem: String,
    /// 0-based sentence index.
    pub sentence: usize,
    /// 0-based position within the sentence.
    pub offset: usize,
}

/// Lowercase stopword set with a label for provenance reporting.
#[derive(Debug, Clone)]
pub struct StopwordList {
    source_name: String,
    words: BTreeSet<String>,
}

static DEFAULT_STOPWORDS: Lazy<StopwordList> = Lazy::new(|| {
    StopwordList::parse("builtin:english", include_str!("../../data/stopwords_en.txt"))
});

impl StopwordList {
    /// Bundled standard English IR stopword list.
    pub fn default_english() -> &'static StopwordList {
        &DEFAULT_STOPWORDS
    }

    /// Parse a list from text: one entry per line, `#` comments ignored.
    /// Entries are lowercased and apostrophes dropped so they match
    /// sanitized tokens; lines with internal whitespace are skipped.
    pub fn parse(source_name: &str, content: &str) -> StopwordList {
        let words = content
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter(|l| !l.contains(char::is_whitespace))
            .map(|l| l.to_lowercase().replace(['\'', '\u{2019}'], ""))
            .filter(|l| !l.is_empty())
            .collect();
        StopwordList {
            source_name: source_name.to_string(),
            words,
        }
    }

    pub fn from_path(path: &Path) -> Result<StopwordList> {
        let content = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(StopwordList::parse(&path.display().to_string(), &content))
    }

    /// Membership test for an already-lowercased word.
    pub fn contains(&self, lower: &str) -> bool {
        self.words.contains(lower)
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Case-insensitive stopword test.
pub fn is_stopword(word: &str, list: &StopwordList) -> bool {
    list.contains(&word.to_lowercase())
}

/// Expert-curated terms that sanitization must not alter.
///
/// Matching is per token: a token equal to an entry (before or after its
/// trailing punctuation is considered) is emitted verbatim, preserving
/// periods such as `sp.`. Multi-word entries are split and each component
/// protected individually.
#[derive(Debug, Clone, Default)]
pub struct CuratedTermList {
    terms: BTreeSet<String>,
}

impl CuratedTermList {
    /// The artifact ships no curated entries by default.
    pub fn empty() -> CuratedTermList {
        CuratedTermList::default()
    }

    pub fn parse(content: &str) -> CuratedTermList {
        let terms = content
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .flat_map(|l| l.split_whitespace())
            .map(str::to_string)
            .collect();
        CuratedTermList { terms }
    }

    pub fn from_path(path: &Path) -> Result<CuratedTermList> {
        let content = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(CuratedTermList::parse(&content))
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains(term)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

// URLs: scheme:// or www.-prefixed runs up to whitespace. Trailing
// sentence-final punctuation is re-emitted so the break survives.
static URL_RE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"(?i)(?:\b[a-z][a-z0-9+.-]*://|\bwww\.)\S+").unwrap());

// Bracketed numeric citations: [12], [3,4], [1-5].
static CITE_NUM_RE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"\[\s*\d+(?:\s*[,;\-]\s*\d+)*\s*\]").unwrap());

// Parenthesised (Name, Year) citations.
static CITE_NAME_RE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"\(\s*[A-Z][^()]*?,\s+(?:19|20)\d\d[a-z]?\s*\)").unwrap());

/// Sanitize a raw text blob for NLP ingestion.
///
/// Removes URLs, bracketed numeric and `(Name, Year)` citations, standalone
/// numbers and punctuation (keeping intra-word hyphens and protected terms),
/// collapses whitespace, and replaces sentence-final punctuation with
/// [`SENTENCE_BREAK`]. Existing newlines are preserved as breaks, which makes
/// the function idempotent.
pub fn sanitize(raw_text: &str, protected: &CuratedTermList) -> String {
    let ends_with_break = raw_text
        .trim_end_matches([' ', '\t'])
        .ends_with(SENTENCE_BREAK);

    let mut sentences: Vec<Vec<String>> = Vec::new();
    let mut current: Vec<String> = Vec::new();
    // whether the last meaningful chunk closed a sentence
    let mut last_chunk_final = false;

    for line in raw_text.split(SENTENCE_BREAK) {
        let line = URL_RE.replace_all(line, |caps: &regex::Captures| {
            let m = caps.get(0).unwrap().as_str();
            let kept = m.trim_end_matches(['.', '!', '?']);
            m[kept.len()..].to_string()
        });
        let line = CITE_NUM_RE.replace_all(&line, "");
        let line = CITE_NAME_RE.replace_all(&line, "");

        for chunk in line.split_whitespace() {
            let (tokens, sentence_final) = clean_chunk(chunk, protected);
            let emitted = !tokens.is_empty();
            current.extend(tokens);
            if sentence_final && !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            if emitted || sentence_final {
                last_chunk_final = sentence_final;
            }
        }
        // line boundary doubles as a sentence boundary
        if !current.is_empty() {
            sentences.push(std::mem::take(&mut current));
        }
    }

    let mut out = sentences
        .iter()
        .map(|s| s.join(" "))
        .collect::<Vec<_>>()
        .join(&SENTENCE_BREAK.to_string());
    if (last_chunk_final || ends_with_break) && !out.is_empty() {
        out.push(SENTENCE_BREAK);
    }
    out
}

/// Clean one whitespace-delimited chunk; returns the surviving tokens and
/// whether the chunk ended a sentence.
fn clean_chunk(chunk: &str, protected: &CuratedTermList) -> (Vec<String>, bool) {
    let chars: Vec<char> = chunk.chars().collect();
    let start = chars
        .iter()
        .position(|c| c.is_alphanumeric())
        .unwrap_or(chars.len());
    let end = chars
        .iter()
        .rposition(|c| c.is_alphanumeric())
        .map(|i| i + 1)
        .unwrap_or(start);
    let stripped_tail: String = chars[end..].iter().collect();
    let sentence_final = stripped_tail.contains(['.', '!', '?'])
        || (start >= end && chunk.contains(['.', '!', '?']));

    if start >= end {
        return (Vec::new(), sentence_final);
    }

    let core: String = chars[start..end].iter().collect();

    // Protected terms keep their exact shape, including a trailing period
    // that is part of the term (in which case it is not a sentence break).
    let with_dot = format!("{core}.");
    if stripped_tail.starts_with('.') && protected.contains(&with_dot) {
        let remaining_tail: String = stripped_tail.chars().skip(1).collect();
        return (vec![with_dot], remaining_tail.contains(['.', '!', '?']));
    }
    if protected.contains(&core) {
        return (vec![core], sentence_final);
    }

    // Keep alphanumerics and intra-word hyphens; other punctuation splits
    // the chunk. Pieces that are purely numeric are standalone numbers and
    // are dropped.
    let mut cleaned = String::with_capacity(core.len());
    let core_chars: Vec<char> = core.chars().collect();
    for (i, &c) in core_chars.iter().enumerate() {
        if c.is_alphanumeric() {
            cleaned.push(c);
        } else if c == '-'
            && i > 0
            && i + 1 < core_chars.len()
            && core_chars[i - 1].is_alphanumeric()
            && core_chars[i + 1].is_alphanumeric()
        {
            cleaned.push('-');
        } else {
            cleaned.push(' ');
        }
    }

    let tokens = cleaned
        .split_whitespace()
        .filter(|piece| !piece.chars().all(|c| c.is_ascii_digit() || c == '-'))
        .map(str::to_string)
        .collect();
    (tokens, sentence_final)
}

/// Segment sanitized text into sentences of fully-populated tokens.
pub fn segment(clean_text: &str) -> Vec<Vec<Token>> {
    clean_text
        .split(SENTENCE_BREAK)
        .filter(|s| !s.trim().is_empty())
        .enumerate()
        .map(|(sentence, line)| {
            line.split_whitespace()
                .enumerate()
                .map(|(offset, surface)| {
                    let lower = surface.to_lowercase();
                    let stem = stem(&lower);
                    Token {
                        surface: surface.to_string(),
                        lower,
                        stem,
                        sentence,
                        offset,
                    }
                })
                .collect()
        })
        .collect()
}

/// Normalize a dictionary or label phrase into tokens comparable with
/// sanitized document tokens: punctuation is stripped (intra-word hyphens
/// kept) but numbers are preserved, since they are part of the term.
pub fn term_tokens(phrase: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in phrase.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut cleaned = String::with_capacity(chunk.len());
        for (i, &c) in chars.iter().enumerate() {
            if c.is_alphanumeric() {
                cleaned.push(c);
            } else if c == '-'
                && i > 0
                && i + 1 < chars.len()
                && chars[i - 1].is_alphanumeric()
                && chars[i + 1].is_alphanumeric()
            {
                cleaned.push('-');
            } else {
                cleaned.push(' ');
            }
        }
        tokens.extend(cleaned.split_whitespace().map(str::to_string));
    }
    tokens
}

/// Lowercase a phrase, stem each whitespace-separated word, rejoin with
/// single spaces.
pub fn stem_phrase(phrase: &str) -> String {
    phrase
        .to_lowercase()
        .split_whitespace()
        .map(stem)
        .collect::<Vec<_>>()
        .join(" ")
}
