//! Document ingestion and the id-encoded corpus the samplers run on.

mod ingest;
mod stopwords;
mod text;

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ingest::{read_csv, read_jsonl, IngestReport, RecordError};
pub use stopwords::{default_stoplist, parse_stoplist, read_stoplist};
pub use text::{clean_text, remove_stopwords, stem, tokenize, Pipeline, MIN_TOKEN_LEN};

pub type WordId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        RawDocument {
            id: id.into(),
            text: text.into(),
        }
    }
}

/// Bijective word ↔ id map, ids dense in `[0, V)` and assigned in order of
/// first occurrence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, WordId>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `word`, allocating the next id if unseen.
    pub fn intern(&mut self, word: &str) -> WordId {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len() as WordId;
        self.words.push(word.to_owned());
        self.index.insert(word.to_owned(), id);
        id
    }

    pub fn id(&self, word: &str) -> Option<WordId> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.words[id as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

impl From<Vec<String>> for Vocabulary {
    fn from(words: Vec<String>) -> Self {
        let mut v = Vocabulary::new();
        for w in &words {
            v.intern(w);
        }
        v
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.words
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<WordId>,
}

impl Document {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedDocument {
    pub id: String,
    pub reason: String,
}

pub const REASON_EMPTY: &str = "empty after preprocessing";
pub const REASON_DUPLICATE: &str = "duplicate id";

/// Read-only, id-encoded document collection.
///
/// Only non-empty documents are kept; everything else lands in `dropped`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    docs: Vec<Document>,
    vocab: Vocabulary,
    dropped: Vec<DroppedDocument>,
    total_tokens: usize,
}

impl Corpus {
    /// Builds a corpus from already-encoded documents. Empty documents are
    /// moved to the dropped log.
    ///
    /// # Panics
    /// If any token id is outside the vocabulary.
    pub fn from_encoded(docs: Vec<Document>, vocab: Vocabulary) -> Self {
        let v = vocab.len() as WordId;
        let mut kept = Vec::with_capacity(docs.len());
        let mut dropped = Vec::new();
        for doc in docs {
            assert!(doc.tokens.iter().all(|&w| w < v), "token id out of range in {}", doc.id);
            if doc.tokens.is_empty() {
                dropped.push(DroppedDocument {
                    id: doc.id,
                    reason: REASON_EMPTY.into(),
                });
            } else {
                kept.push(doc);
            }
        }
        let total_tokens = kept.iter().map(Document::len).sum();
        Corpus {
            docs: kept,
            vocab,
            dropped,
            total_tokens,
        }
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn doc(&self, d: usize) -> &Document {
        &self.docs[d]
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn dropped(&self) -> &[DroppedDocument] {
        &self.dropped
    }

    pub fn total_tokens(&self) -> usize {
        self.total_tokens
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Number of documents containing each word at least once.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0usize; self.vocab.len()];
        let mut seen = HashSet::new();
        for doc in &self.docs {
            seen.clear();
            for &w in &doc.tokens {
                if seen.insert(w) {
                    df[w as usize] += 1;
                }
            }
        }
        df
    }
}

/// Runs the text pipeline over every document and id-encodes the result.
///
/// Documents are preprocessed in parallel; ids are then assigned
/// sequentially so the vocabulary order depends only on input order.
/// Duplicate ids after the first and documents left without tokens are
/// recorded in the dropped log.
pub fn build_corpus(raw_docs: &[RawDocument], pipeline: &Pipeline) -> Corpus {
    let processed: Vec<Vec<String>> = raw_docs.par_iter().map(|d| pipeline.process(&d.text)).collect();

    let mut vocab = Vocabulary::new();
    let mut seen_ids = HashSet::new();
    let mut docs = Vec::with_capacity(raw_docs.len());
    let mut dropped = Vec::new();
    for (raw, tokens) in raw_docs.iter().zip(processed) {
        if !seen_ids.insert(raw.id.as_str()) {
            log::warn!("dropping document {}: duplicate id", raw.id);
            dropped.push(DroppedDocument {
                id: raw.id.clone(),
                reason: REASON_DUPLICATE.into(),
            });
            continue;
        }
        if tokens.is_empty() {
            dropped.push(DroppedDocument {
                id: raw.id.clone(),
                reason: REASON_EMPTY.into(),
            });
            continue;
        }
        let ids = tokens.iter().map(|t| vocab.intern(t)).collect();
        docs.push(Document {
            id: raw.id.clone(),
            tokens: ids,
        });
    }
    let total_tokens = docs.iter().map(Document::len).sum();
    Corpus {
        docs,
        vocab,
        dropped,
        total_tokens,
    }
}
