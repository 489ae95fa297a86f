//! Readability scoring: Flesch Reading Ease, Automated Readability Index,
//! and the Dale-Chall formula.
//!
//! Published readability numbers vary with tokenization, so the counting
//! rules are fixed here and shared by every caller:
//!
//! * words: maximal alphanumeric runs;
//! * sentences: a run of `.`, `?`, or `!` followed by whitespace or end of
//!   text closes a sentence; only segments containing a word count, and a
//!   text with words has at least one sentence;
//! * syllables: vowel groups (`aeiouy`) per word, minus one for a silent
//!   final `e` (word ends in `e` but not `le`, and has more than one
//!   group), minimum one; purely numeric words count one syllable;
//! * characters: alphanumeric characters inside words;
//! * difficult words: not on the bundled easy-word list and not a number.
//!
//! The easy-word list ships with the crate and is versioned; Dale-Chall
//! values are comparable only against the same list.

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_count, real, Real};
use crate::Score;

const EASY_WORDS_RAW: &str = include_str!("data/easy_words.txt");

fn easy_words() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        EASY_WORDS_RAW
            .lines()
            .map(str::trim)
            .filter(|w| !w.is_empty() && !w.starts_with('#'))
            .collect()
    })
}

/// Tallies the readability formulas consume. Additive: corpus-level scores
/// aggregate per-record counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextCounts {
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
    pub characters: usize,
    pub difficult_words: usize,
}

impl TextCounts {
    pub fn add(&mut self, other: &TextCounts) {
        self.words += other.words;
        self.sentences += other.sentences;
        self.syllables += other.syllables;
        self.characters += other.characters;
        self.difficult_words += other.difficult_words;
    }
}

/// Counts words, sentences, syllables, characters, and difficult words
/// under the pinned rules above.
pub fn count_text(text: &str) -> TextCounts {
    let mut counts = TextCounts::default();
    let mut word = String::new();
    let mut segment_has_word = false;
    let mut chars = text.chars().peekable();

    let flush_word = |word: &mut String, counts: &mut TextCounts| {
        if word.is_empty() {
            return;
        }
        counts.words += 1;
        counts.characters += word.chars().count();
        counts.syllables += syllables(word);
        if is_difficult(word) {
            counts.difficult_words += 1;
        }
        word.clear();
    };

    while let Some(c) = chars.next() {
        if c.is_alphanumeric() {
            word.push(c);
            segment_has_word = true;
            continue;
        }
        flush_word(&mut word, &mut counts);
        if matches!(c, '.' | '?' | '!') {
            while matches!(chars.peek(), Some('.' | '?' | '!')) {
                chars.next();
            }
            let closes = match chars.peek() {
                None => true,
                Some(next) => next.is_whitespace(),
            };
            if closes && segment_has_word {
                counts.sentences += 1;
                segment_has_word = false;
            }
        }
    }
    flush_word(&mut word, &mut counts);
    if segment_has_word {
        counts.sentences += 1;
    }
    counts
}

fn is_difficult(word: &str) -> bool {
    if word.chars().all(|c| c.is_ascii_digit()) {
        return false;
    }
    !easy_words().contains(word.to_lowercase().as_str())
}

/// Syllable estimate for one word.
pub fn syllables(word: &str) -> usize {
    let lower = word.to_lowercase();
    let letters: Vec<char> = lower.chars().filter(|c| c.is_alphabetic()).collect();
    if letters.is_empty() {
        return 1;
    }
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0usize;
    let mut in_group = false;
    for &c in &letters {
        if is_vowel(c) {
            if !in_group {
                groups += 1;
            }
            in_group = true;
        } else {
            in_group = false;
        }
    }
    let n = letters.len();
    // Final e is silent ("pale") unless consonant+le forms its own
    // syllable ("table").
    let consonant_le = n >= 3 && letters[n - 2] == 'l' && !is_vowel(letters[n - 3]);
    let silent_e = groups > 1 && letters[n - 1] == 'e' && !consonant_le;
    if silent_e {
        groups -= 1;
    }
    groups.max(1)
}

/// Flesch Reading Ease. Higher is easier; unbounded on both sides.
pub fn flesch_reading_ease<F: Real>(words: u64, sentences: u64, syllables: u64) -> F {
    let w = from_count::<F>(words);
    real::<F>(206.835)
        - real::<F>(1.015) * (w / from_count(sentences))
        - real::<F>(84.6) * (from_count::<F>(syllables) / w)
}

/// Automated Readability Index.
pub fn automated_readability_index<F: Real>(characters: u64, words: u64, sentences: u64) -> F {
    let w = from_count::<F>(words);
    real::<F>(4.71) * (from_count::<F>(characters) / w)
        + real::<F>(0.5) * (w / from_count(sentences))
        - real::<F>(21.43)
}

/// Dale-Chall readability score.
pub fn dale_chall<F: Real>(difficult_words: u64, words: u64, sentences: u64) -> F {
    let w = from_count::<F>(words);
    let difficult_share = from_count::<F>(difficult_words) / w;
    let mut score = real::<F>(0.1579) * real::<F>(100.0) * difficult_share
        + real::<F>(0.0496) * (w / from_count(sentences));
    if difficult_share > real::<F>(0.05) {
        score = score + real::<F>(3.6365);
    }
    score
}

/// All three scores plus the counts they were computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityScores {
    pub flesch_reading_ease: Score,
    pub automated_readability_index: Score,
    pub dale_chall: Score,
    pub counts: TextCounts,
}

/// Scores aggregated counts. Errors when there are no words: every formula
/// divides by the word count.
pub fn scores_from_counts(counts: &TextCounts) -> Result<ReadabilityScores> {
    if counts.words == 0 {
        return Err(Error::NoWords);
    }
    debug_assert!(counts.sentences > 0, "words imply at least one sentence");
    let (w, s, syl, ch, diff) = (
        counts.words as u64,
        counts.sentences as u64,
        counts.syllables as u64,
        counts.characters as u64,
        counts.difficult_words as u64,
    );
    Ok(ReadabilityScores {
        flesch_reading_ease: flesch_reading_ease(w, s, syl),
        automated_readability_index: automated_readability_index(ch, w, s),
        dale_chall: dale_chall(diff, w, s),
        counts: *counts,
    })
}

/// Scores one text.
pub fn readability(text: &str) -> Result<ReadabilityScores> {
    scores_from_counts(&count_text(text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn counting_rules_on_simple_text() {
        let counts = count_text("The cat sat.");
        assert_eq!(counts.words, 3);
        assert_eq!(counts.sentences, 1);
        assert_eq!(counts.syllables, 3);
        assert_eq!(counts.characters, 9);
    }

    #[test]
    fn flesch_matches_hand_computation() {
        let scores = readability("The cat sat.").unwrap();
        assert_abs_diff_eq!(scores.flesch_reading_ease, 119.19, epsilon = 1e-9);
    }

    #[test]
    fn ari_matches_hand_computation() {
        let scores = readability("a").unwrap();
        assert_abs_diff_eq!(scores.automated_readability_index, -16.22, epsilon = 1e-9);
    }

    #[test]
    fn dale_chall_without_difficult_words() {
        // Ten easy words, one sentence: only the sentence-length term.
        let scores = readability("The cat and the dog sat on the old mat.").unwrap();
        assert_eq!(scores.counts.difficult_words, 0);
        assert_abs_diff_eq!(scores.dale_chall, 0.496, epsilon = 1e-9);
    }

    #[test]
    fn dale_chall_penalty_applies_above_five_percent() {
        // "insomnia" and "nausea" are not on the easy list: 2/10 difficult.
        let text = "The cat and the dog had bad insomnia and nausea.";
        let counts = count_text(text);
        assert_eq!(counts.words, 10);
        assert_eq!(counts.difficult_words, 2);
        let scores = readability(text).unwrap();
        let expected = 0.1579 * 20.0 + 0.0496 * 10.0 + 3.6365;
        assert_abs_diff_eq!(scores.dale_chall, expected, epsilon = 1e-9);
    }

    #[test]
    fn sentence_rule_requires_trailing_whitespace_or_end() {
        assert_eq!(count_text("a.b").sentences, 1);
        assert_eq!(count_text("a. b").sentences, 2);
        assert_eq!(count_text("What?! Really... yes.").sentences, 3);
        assert_eq!(count_text("no terminator at all").sentences, 1);
        assert_eq!(count_text("tail. ").sentences, 1);
    }

    #[test]
    fn syllable_estimates() {
        for (word, expected) in [
            ("cat", 1),
            ("the", 1),
            ("be", 1),
            ("pale", 1),
            ("table", 2),
            ("headache", 2),
            ("dizziness", 3),
            ("readability", 5),
            ("aspirin", 3),
            ("123", 1),
        ] {
            assert_eq!(syllables(word), expected, "word {word:?}");
        }
    }

    #[test]
    fn numbers_are_words_but_never_difficult() {
        let counts = count_text("took 20 mg");
        assert_eq!(counts.words, 3);
        assert_eq!(counts.difficult_words, 1); // "mg"
    }

    #[test]
    fn empty_text_is_an_error() {
        assert!(matches!(readability("  !! "), Err(Error::NoWords)));
    }

    #[test]
    fn kernels_agree_across_scalar_types() {
        let f32_value: f32 = flesch_reading_ease(100, 5, 130);
        let f64_value: f64 = flesch_reading_ease(100, 5, 130);
        assert_abs_diff_eq!(f32_value as f64, f64_value, epsilon = 1e-4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        /// Appending a polysyllabic word lowers Flesch: the syllable ratio
        /// rises and the words-per-sentence term grows.
        #[test]
        fn appending_a_hard_word_lowers_flesch(
            words in proptest::collection::vec("[bcdfg][aeiou][bcdfg]{0,2}", 1..12),
        ) {
            let base = format!("{}.", words.join(" "));
            let harder = format!("{} dizziness discombobulation.", words.join(" "));
            let a = readability(&base).unwrap().flesch_reading_ease;
            let b = readability(&harder).unwrap().flesch_reading_ease;
            prop_assert!(b < a, "{base:?} {a} vs {harder:?} {b}");
        }

        #[test]
        fn counts_never_panic_and_stay_consistent(text in ".{0,200}") {
            let counts = count_text(&text);
            prop_assert!(counts.syllables >= counts.words);
            prop_assert!(counts.difficult_words <= counts.words);
            prop_assert!(counts.characters >= counts.words);
            if counts.words > 0 {
                prop_assert!(counts.sentences >= 1);
            }
        }
    }
}
