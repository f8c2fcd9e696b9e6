//! Porter suffix-stripping stemmer.
//!
//! Follows the reference distribution of the classic algorithm (Porter, 1980,
//! "An algorithm for suffix stripping", Program 14(3)), including the two
//! step-2 amendments the author folded into the canonical implementation
//! (`bli` -> `ble`, `logi` -> `log`). Words of one or two characters and
//! words containing non-ASCII bytes are returned unchanged, as in the
//! reference distribution.
//!
//! The algorithm is not idempotent in general; callers stem exactly once.

/// Stem a single lowercase word. No whitespace handling is performed.
pub fn stem(word: &str) -> String {
    if word.len() <= 2 || !word.is_ascii() {
        return word.to_string();
    }
    let mut s = Stemmer {
        b: word.as_bytes().to_vec(),
        k: word.len(),
        j: 0,
    };
    s.step1ab();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5();
    s.b.truncate(s.k);
    // input was ASCII, truncation happens on byte boundaries
    String::from_utf8(s.b).expect("ascii buffer")
}

/// Working buffer: `b[..k]` is the live word, `b[..j]` the candidate stem
/// left of the suffix most recently matched by `ends`.
struct Stemmer {
    b: Vec<u8>,
    k: usize,
    j: usize,
}

impl Stemmer {
    fn is_consonant(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.is_consonant(i - 1),
            _ => true,
        }
    }

    /// Number of vowel-consonant sequences in `b[..j]`.
    fn measure(&self) -> usize {
        let mut n = 0;
        let mut i = 0;
        while i < self.j && self.is_consonant(i) {
            i += 1;
        }
        loop {
            while i < self.j && !self.is_consonant(i) {
                i += 1;
            }
            if i == self.j {
                return n;
            }
            n += 1;
            while i < self.j && self.is_consonant(i) {
                i += 1;
            }
            if i == self.j {
                return n;
            }
        }
    }

    fn vowel_in_stem(&self) -> bool {
        (0..self.j).any(|i| !self.is_consonant(i))
    }

    /// True when `b[i]` repeats `b[i-1]` and both are consonants.
    fn double_consonant(&self, i: usize) -> bool {
        i >= 1 && self.b[i] == self.b[i - 1] && self.is_consonant(i)
    }

    /// consonant-vowel-consonant ending at `i`, last consonant not w/x/y.
    fn cvc(&self, i: usize) -> bool {
        if i < 2 || !self.is_consonant(i) || self.is_consonant(i - 1) || !self.is_consonant(i - 2)
        {
            return false;
        }
        !matches!(self.b[i], b'w' | b'x' | b'y')
    }

    /// Does `b[..k]` end with `suffix`? Sets `j` to the stem length on success.
    fn ends(&mut self, suffix: &[u8]) -> bool {
        if suffix.len() > self.k || &self.b[self.k - suffix.len()..self.k] != suffix {
            return false;
        }
        self.j = self.k - suffix.len();
        true
    }

    /// Replace the suffix `b[j..k]` with `s`.
    fn set_to(&mut self, s: &[u8]) {
        self.b.truncate(self.j);
        self.b.extend_from_slice(s);
        self.k = self.j + s.len();
    }

    /// `set_to` gated on measure > 0.
    fn replace(&mut self, s: &[u8]) {
        if self.measure() > 0 {
            self.set_to(s);
        }
    }

    /// Plurals and -ed / -ing.
    fn step1ab(&mut self) {
        if self.b[self.k - 1] == b's' {
            if self.ends(b"sses") {
                self.k -= 2;
            } else if self.ends(b"ies") {
                self.set_to(b"i");
            } else if self.b[self.k - 2] != b's' {
                self.k -= 1;
            }
        }
        if self.ends(b"eed") {
            if self.measure() > 0 {
                self.k -= 1;
            }
        } else if (self.ends(b"ed") || self.ends(b"ing")) && self.vowel_in_stem() {
            self.k = self.j;
            if self.ends(b"at") {
                self.set_to(b"ate");
            } else if self.ends(b"bl") {
                self.set_to(b"ble");
            } else if self.ends(b"iz") {
                self.set_to(b"ize");
            } else if self.double_consonant(self.k - 1) {
                if !matches!(self.b[self.k - 2], b'l' | b's' | b'z') {
                    self.k -= 1;
                }
            } else {
                self.j = self.k;
                if self.measure() == 1 && self.cvc(self.k - 1) {
                    self.set_to(b"e");
                }
            }
        }
    }

    /// Terminal y -> i when the stem contains a vowel.
    fn step1c(&mut self) {
        if self.ends(b"y") && self.vowel_in_stem() {
            self.b[self.k - 1] = b'i';
        }
    }

    /// Double-suffix reductions, applied when measure > 0.
    fn step2(&mut self) {
        const RULES: &[(&[u8], &[u8])] = &[
            (b"ational", b"ate"),
            (b"tional", b"tion"),
            (b"enci", b"ence"),
            (b"anci", b"ance"),
            (b"izer", b"ize"),
            (b"bli", b"ble"),
            (b"alli", b"al"),
            (b"entli", b"ent"),
            (b"eli", b"e"),
            (b"ousli", b"ous"),
            (b"ization", b"ize"),
            (b"ation", b"ate"),
            (b"ator", b"ate"),
            (b"alism", b"al"),
            (b"iveness", b"ive"),
            (b"fulness", b"ful"),
            (b"ousness", b"ous"),
            (b"aliti", b"al"),
            (b"iviti", b"ive"),
            (b"biliti", b"ble"),
            (b"logi", b"log"),
        ];
        for (suffix, replacement) in RULES {
            if self.ends(suffix) {
                self.replace(replacement);
                return;
            }
        }
    }

    /// -ic-, -full, -ness and similar, applied when measure > 0.
    fn step3(&mut self) {
        const RULES: &[(&[u8], &[u8])] = &[
            (b"icate", b"ic"),
            (b"ative", b""),
            (b"alize", b"al"),
            (b"iciti", b"ic"),
            (b"ical", b"ic"),
            (b"ful", b""),
            (b"ness", b""),
        ];
        for (suffix, replacement) in RULES {
            if self.ends(suffix) {
                self.replace(replacement);
                return;
            }
        }
    }

    /// Drop residual suffixes when measure > 1.
    fn step4(&mut self) {
        const SUFFIXES: &[&[u8]] = &[
            b"al", b"ance", b"ence", b"er", b"ic", b"able", b"ible", b"ant", b"ement", b"ment",
            b"ent", b"ion", b"ou", b"ism", b"ate", b"iti", b"ous", b"ive", b"ize",
        ];
        for suffix in SUFFIXES {
            if self.ends(suffix) {
                // -ion only counts after s or t
                if *suffix == b"ion"
                    && !(self.j >= 1 && matches!(self.b[self.j - 1], b's' | b't'))
                {
                    continue;
                }
                if self.measure() > 1 {
                    self.k = self.j;
                }
                return;
            }
        }
    }

    /// Remove final -e and reduce -ll under measure conditions.
    fn step5(&mut self) {
        self.j = self.k;
        if self.b[self.k - 1] == b'e' {
            let m = self.measure();
            if m > 1 || (m == 1 && !(self.k >= 2 && self.cvc(self.k - 2))) {
                self.k -= 1;
            }
        }
        if self.b[self.k - 1] == b'l' && self.double_consonant(self.k - 1) && self.measure() > 1 {
            self.k -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::stem;

    #[test]
    fn paper_table_stems() {
        assert_eq!(stem("genomes"), "genom");
        assert_eq!(stem("sequencing"), "sequenc");
        assert_eq!(stem("dna"), "dna");
        assert_eq!(stem("evolution"), "evolut");
        assert_eq!(stem("symbiosis"), "symbiosi");
        assert_eq!(stem("diversity"), "divers");
        assert_eq!(stem("bacteria"), "bacteria");
    }

    #[test]
    fn short_words_unchanged() {
        assert_eq!(stem("of"), "of");
        assert_eq!(stem("a"), "a");
        assert_eq!(stem(""), "");
    }

    #[test]
    fn non_ascii_unchanged() {
        assert_eq!(stem("café"), "café");
    }

    #[test]
    fn classic_rule_examples() {
        assert_eq!(stem("caresses"), "caress");
        assert_eq!(stem("ponies"), "poni");
        assert_eq!(stem("cats"), "cat");
        assert_eq!(stem("feed"), "feed");
        assert_eq!(stem("agreed"), "agre");
        assert_eq!(stem("motoring"), "motor");
        assert_eq!(stem("hopping"), "hop");
        assert_eq!(stem("falling"), "fall");
        assert_eq!(stem("happy"), "happi");
        assert_eq!(stem("sky"), "sky");
        assert_eq!(stem("relational"), "relat");
        assert_eq!(stem("conformabli"), "conform");
        assert_eq!(stem("vietnamization"), "vietnam");
        assert_eq!(stem("triplicate"), "triplic");
        assert_eq!(stem("hopeful"), "hope");
        assert_eq!(stem("goodness"), "good");
        assert_eq!(stem("revival"), "reviv");
        assert_eq!(stem("adoption"), "adopt");
        assert_eq!(stem("cease"), "ceas");
        assert_eq!(stem("controll"), "control");
        assert_eq!(stem("roll"), "roll");
    }

    // The full reference vector suite runs in tests/porter_reference.rs.
}
