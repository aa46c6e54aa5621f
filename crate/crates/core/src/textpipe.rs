//! Raw idea text to a bag of taxonomy concepts.
//!
//! Tokenization rules:
//!
//! 1. lowercase the text;
//! 2. drop apostrophes (`don't` becomes `dont`);
//! 3. every other character that is not alphanumeric separates tokens, so
//!    hyphenated compounds split (`paper-weight` gives `paper`, `weight`);
//! 4. remove stop-words.
//!
//! Each surviving token passes through a [`SpellChecker`] (identity by
//! default) and is then looked up in the [`Lexicon`], first as written and
//! then through a short list of suffix-stripped forms. The first listed
//! sense wins. Tokens with no entry are kept in [`ConceptBag::dropped`].

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::taxonomy::{ConceptId, Lexicon, Taxonomy};

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    /// The bundled English list.
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn none() -> Self {
        StopWords(HashSet::new())
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopWords(
            words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        )
    }

    /// One word per line; blank lines and `#` comments are skipped.
    pub fn read<R: BufRead>(reader: R) -> std::io::Result<Self> {
        let mut words = HashSet::new();
        for line in reader.lines() {
            let line = line?;
            let word = line.trim();
            if !word.is_empty() && !word.starts_with('#') {
                words.insert(word.to_lowercase());
            }
        }
        Ok(StopWords(words))
    }

    pub fn load(path: impl AsRef<Path>) -> std::io::Result<Self> {
        Self::read(BufReader::new(File::open(path)?))
    }

    fn parse(text: &str) -> Self {
        Self::read(text.as_bytes()).expect("reading from memory")
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for StopWords {
    fn default() -> Self {
        Self::english()
    }
}

pub fn normalize_text(raw: &str, stopwords: &StopWords) -> Vec<String> {
    let cleaned: String = raw
        .chars()
        .filter(|c| !matches!(c, '\'' | '\u{2019}'))
        .flat_map(char::to_lowercase)
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    cleaned
        .split_whitespace()
        .filter(|t| !stopwords.contains(t))
        .map(str::to_string)
        .collect()
}

/// Hook for correcting misspelled tokens before lexicon lookup.
pub trait SpellChecker: Send + Sync {
    fn correct(&self, token: &str) -> String;
}

/// Leaves every token unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoSpellCheck;

impl SpellChecker for NoSpellCheck {
    fn correct(&self, token: &str) -> String {
        token.to_string()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConceptBag {
    /// Mapped concepts in token order; repeats are kept.
    pub concepts: Vec<ConceptId>,
    pub dropped: Vec<String>,
}

impl ConceptBag {
    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn extend(&mut self, other: ConceptBag) {
        self.concepts.extend(other.concepts);
        self.dropped.extend(other.dropped);
    }
}

/// Lookup forms tried for a token, in order: the token itself, then
/// suffix-stripped variants (`ies`→`y`, `es`, `s`, `ing`, `ing`→`e`, `ed`,
/// `ed`→`e`). A stripped stem must keep at least three characters.
pub fn noun_candidates(token: &str) -> Vec<String> {
    const RULES: [(&str, &str); 7] = [
        ("ies", "y"),
        ("es", ""),
        ("s", ""),
        ("ing", ""),
        ("ing", "e"),
        ("ed", ""),
        ("ed", "e"),
    ];
    let mut out = vec![token.to_string()];
    for (suffix, replacement) in RULES {
        if let Some(stem) = token.strip_suffix(suffix) {
            if suffix == "s" && stem.ends_with('s') {
                continue;
            }
            if stem.chars().count() >= 3 {
                let candidate = format!("{stem}{replacement}");
                if !out.contains(&candidate) {
                    out.push(candidate);
                }
            }
        }
    }
    out
}

pub fn map_to_concepts<S: AsRef<str>>(tokens: &[S], taxonomy: &Taxonomy, lexicon: &Lexicon) -> ConceptBag {
    let mut bag = ConceptBag::default();
    for token in tokens {
        let token = token.as_ref();
        let sense = noun_candidates(token)
            .iter()
            .find_map(|form| lexicon.first_sense(form))
            .filter(|id| taxonomy.contains(id));
        match sense {
            Some(id) => bag.concepts.push(id.clone()),
            None => bag.dropped.push(token.to_string()),
        }
    }
    bag
}

/// Stop-words plus a spell-check hook; turns idea text into concept bags.
pub struct TextPipeline {
    stopwords: StopWords,
    speller: Box<dyn SpellChecker>,
}

impl TextPipeline {
    pub fn new(stopwords: StopWords) -> Self {
        TextPipeline {
            stopwords,
            speller: Box::new(NoSpellCheck),
        }
    }

    pub fn with_spell_checker(mut self, speller: impl SpellChecker + 'static) -> Self {
        self.speller = Box::new(speller);
        self
    }

    pub fn stopwords(&self) -> &StopWords {
        &self.stopwords
    }

    pub fn tokens(&self, text: &str) -> Vec<String> {
        normalize_text(text, &self.stopwords)
            .into_iter()
            .map(|t| self.speller.correct(&t))
            .filter(|t| !t.is_empty())
            .collect()
    }

    pub fn bag(&self, text: &str, taxonomy: &Taxonomy, lexicon: &Lexicon) -> ConceptBag {
        map_to_concepts(&self.tokens(text), taxonomy, lexicon)
    }
}

impl Default for TextPipeline {
    fn default() -> Self {
        TextPipeline::new(StopWords::english())
    }
}

impl std::fmt::Debug for TextPipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TextPipeline")
            .field("stopwords", &self.stopwords.len())
            .finish_non_exhaustive()
    }
}
