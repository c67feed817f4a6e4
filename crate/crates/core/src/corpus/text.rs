//! Tweet text normalisation: regex cleaning, tokenisation, stopword
//! filtering and stemming.

use std::collections::HashSet;
use std::sync::LazyLock;

use regex::Regex;
use rust_stemmers::{Algorithm, Stemmer};

static URL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"http\S+").unwrap());
static MENTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@[A-Za-z0-9]+").unwrap());
static HASHTAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"#[A-Za-z0-9]+").unwrap());
static NON_ALPHA: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[^a-zA-Z]+").unwrap());

static PORTER: LazyLock<Stemmer> = LazyLock::new(|| Stemmer::create(Algorithm::English));

/// Minimum token length kept by [`tokenize`].
pub const MIN_TOKEN_LEN: usize = 2;

/// Strips URLs, mentions and hashtags (in that order), replaces every run of
/// non-ASCII-letters with a single space, lowercases and trims.
///
/// Digits disappear in the last stage, so "removal of numbers" needs no
/// separate pass.
pub fn clean_text(text: &str) -> String {
    let s = URL.replace_all(text, " ");
    let s = MENTION.replace_all(&s, " ");
    let s = HASHTAG.replace_all(&s, " ");
    let s = NON_ALPHA.replace_all(&s, " ");
    s.trim().to_ascii_lowercase()
}

/// Whitespace split with a minimum-length filter.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter(|t| t.chars().count() >= MIN_TOKEN_LEN)
        .map(str::to_owned)
        .collect()
}

/// Porter (English snowball) stem of a lowercase token.
pub fn stem(token: &str) -> String {
    PORTER.stem(token).into_owned()
}

pub fn remove_stopwords(tokens: Vec<String>, stoplist: &HashSet<String>) -> Vec<String> {
    tokens
        .into_iter()
        .filter(|t| !stoplist.contains(t))
        .collect()
}

/// Settings for the clean → tokenize → stopwords → stem chain.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub stoplist: HashSet<String>,
    pub stemming: bool,
    /// Optional English word list; tokens outside it are dropped before
    /// stopword removal. Off unless a list is supplied.
    pub dictionary: Option<HashSet<String>>,
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline {
            stoplist: super::stopwords::default_stoplist(),
            stemming: true,
            dictionary: None,
        }
    }
}

impl Pipeline {
    pub fn new(stoplist: HashSet<String>, stemming: bool) -> Self {
        Pipeline {
            stoplist,
            stemming,
            dictionary: None,
        }
    }

    /// Runs the full text chain on one document or query.
    pub fn process(&self, text: &str) -> Vec<String> {
        let mut tokens = tokenize(&clean_text(text));
        if let Some(dict) = &self.dictionary {
            tokens.retain(|t| dict.contains(t));
        }
        let tokens = remove_stopwords(tokens, &self.stoplist);
        if self.stemming {
            tokens.iter().map(|t| stem(t)).collect()
        } else {
            tokens
        }
    }
}
