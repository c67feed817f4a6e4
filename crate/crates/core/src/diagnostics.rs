//! Topic quality metrics and summaries of the per-document confidences.

use std::collections::HashMap;

use serde::Serialize;

use crate::corpus::{Corpus, WordId};
use crate::error::{Error, Result};
use crate::sampler::{DocTopicRow, TopicModel};

pub const DEFAULT_TOP_WORDS: usize = 10;
pub const DEFAULT_EPSILON: f64 = 1e-12;

/// The `n` highest-count words of topic `t` with their φ̂ weight. Ranked by
/// n_{w|t} descending, equal counts in lexicographic word order.
pub fn top_words(model: &TopicModel, corpus: &Corpus, t: usize, n: usize) -> Vec<(WordId, f64)> {
    let vocab = corpus.vocab();
    let mut ids: Vec<WordId> = (0..model.vocab_size() as WordId).collect();
    ids.sort_by(|&a, &b| {
        model
            .n_wt(b, t)
            .cmp(&model.n_wt(a, t))
            .then_with(|| vocab.word(a).cmp(vocab.word(b)))
    });
    ids.truncate(n);
    let denom = model.beta_v() + model.n_t(t) as f64;
    ids.into_iter()
        .map(|w| (w, (model.beta() + model.n_wt(w, t) as f64) / denom))
        .collect()
}

/// Pairwise log-ratio coherence of a ranked word list:
///
/// ```text
/// C = 2 / (N(N−1)) · Σ_{i≥2} Σ_{j<i} ln((P(w_i, w_j) + ε) / P(w_j))
/// ```
///
/// with P the fraction of documents containing the word(s).
pub fn topic_coherence(top: &[WordId], corpus: &Corpus, eps: f64) -> Result<f64> {
    let n = top.len();
    if n < 2 {
        return Err(Error::TooFewTopWords(n));
    }
    let slot: HashMap<WordId, usize> = top.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let mut df = vec![0usize; n];
    let mut co = vec![vec![0usize; n]; n];
    let mut present = vec![false; n];
    for doc in corpus.docs() {
        present.iter_mut().for_each(|p| *p = false);
        for w in &doc.tokens {
            if let Some(&i) = slot.get(w) {
                present[i] = true;
            }
        }
        for i in 0..n {
            if !present[i] {
                continue;
            }
            df[i] += 1;
            for j in 0..i {
                if present[j] {
                    co[i][j] += 1;
                }
            }
        }
    }
    let docs = corpus.num_docs() as f64;
    let mut sum = 0.0;
    for i in 1..n {
        for j in 0..i {
            if df[j] == 0 {
                return Err(Error::ZeroFrequency(corpus.vocab().word(top[j]).to_owned()));
            }
            let p_ij = co[i][j] as f64 / docs;
            let p_j = df[j] as f64 / docs;
            sum += ((p_ij + eps) / p_j).ln();
        }
    }
    let nf = n as f64;
    Ok(2.0 / (nf * (nf - 1.0)) * sum)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean of the per-topic coherences over each topic's top `n` words.
pub fn average_model_coherence(model: &TopicModel, corpus: &Corpus, n: usize, eps: f64) -> Result<f64> {
    let per_topic = (0..model.k())
        .map(|t| {
            let top: Vec<WordId> = top_words(model, corpus, t, n).into_iter().map(|(w, _)| w).collect();
            topic_coherence(&top, corpus, eps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mean(&per_topic))
}

/// Mean share of each top word's φ̂ mass that belongs to topic `t`.
pub fn exclusivity(model: &TopicModel, corpus: &Corpus, t: usize, top_n: usize) -> f64 {
    let top = top_words(model, corpus, t, top_n);
    let (beta, beta_v) = (model.beta(), model.beta_v());
    let shares: Vec<f64> = top
        .iter()
        .map(|&(w, phi_t)| {
            let total: f64 = (0..model.k())
                .map(|u| (beta + model.n_wt(w, u) as f64) / (beta_v + model.n_t(u) as f64))
                .sum();
            phi_t / total
        })
        .collect();
    mean(&shares)
}

/// Entropy (nats) of how topic `t`'s tokens spread over documents.
pub fn document_entropy(model: &TopicModel, t: usize) -> f64 {
    let total = model.n_t(t);
    if total == 0 {
        log::warn!("topic {t} has no tokens; document entropy set to 0");
        return 0.0;
    }
    let total = total as f64;
    -(0..model.num_docs())
        .map(|d| model.n_td(d, t))
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            p * p.ln()
        })
        .sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicReport {
    pub topic: usize,
    pub top_words: Vec<(String, f64)>,
    pub coherence: f64,
    pub exclusivity: f64,
    pub document_entropy: f64,
    pub tokens: u32,
    pub avg_word_length: f64,
}

/// One report per topic using the same `top_n` words for coherence,
/// exclusivity and average word length.
pub fn topic_reports(model: &TopicModel, corpus: &Corpus, top_n: usize, eps: f64) -> Result<Vec<TopicReport>> {
    (0..model.k())
        .map(|t| {
            let top = top_words(model, corpus, t, top_n);
            let ids: Vec<WordId> = top.iter().map(|&(w, _)| w).collect();
            let words: Vec<(String, f64)> = top
                .iter()
                .map(|&(w, p)| (corpus.vocab().word(w).to_owned(), p))
                .collect();
            let chars: usize = words.iter().map(|(w, _)| w.chars().count()).sum();
            Ok(TopicReport {
                topic: t,
                coherence: topic_coherence(&ids, corpus, eps)?,
                exclusivity: exclusivity(model, corpus, t, top_n),
                document_entropy: document_entropy(model, t),
                tokens: model.n_t(t),
                avg_word_length: chars as f64 / words.len() as f64,
                top_words: words,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceStats {
    pub topics: Vec<ColumnStats>,
}

/// Min, max, mean and population std of every confidence column.
pub fn confidence_stats(rows: &[DocTopicRow]) -> Result<ConfidenceStats> {
    let first = rows.first().ok_or(Error::EmptyInput("confidence rows"))?;
    let k = first.confidences.len();
    if rows.iter().any(|r| r.confidences.len() != k) {
        return Err(Error::InvalidParameter("rows disagree on topic count".into()));
    }
    let n = rows.len() as f64;
    let topics = (0..k)
        .map(|t| {
            let col = rows.iter().map(|r| r.confidences[t]);
            let min = col.clone().fold(f64::INFINITY, f64::min);
            let max = col.clone().fold(f64::NEG_INFINITY, f64::max);
            let mean = col.clone().sum::<f64>() / n;
            let var = col.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            ColumnStats {
                min,
                max,
                mean: mean.clamp(min, max),
                std: var.sqrt(),
            }
        })
        .collect();
    Ok(ConfidenceStats { topics })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    /// Row count per predicted topic.
    pub counts: Vec<usize>,
}

/// Slack for confidences that sit on a bin edge but land a hair below it
/// after division (e.g. 0.7 / 0.1 = 6.999…).
const EDGE_SLACK: f64 = 1e-9;

/// Histogram of the confidence column `topic`, split by predicted topic.
/// Bins are `[i·w, (i+1)·w)`, except the last which also holds 1.0.
pub fn confidence_histogram(rows: &[DocTopicRow], topic: usize, bin_width: f64, k: usize) -> Result<Vec<HistogramBin>> {
    if !(bin_width > 0.0 && bin_width <= 1.0) {
        return Err(Error::InvalidParameter(format!("bin width {bin_width} outside (0, 1]")));
    }
    let nbins = ((1.0 / bin_width) - EDGE_SLACK).ceil().max(1.0) as usize;
    let mut bins: Vec<HistogramBin> = (0..nbins)
        .map(|i| HistogramBin {
            lo: i as f64 * bin_width,
            hi: ((i + 1) as f64 * bin_width).min(1.0),
            counts: vec![0; k],
        })
        .collect();
    for r in rows {
        let c = r.confidences[topic];
        let idx = ((c / bin_width + EDGE_SLACK).floor().max(0.0) as usize).min(nbins - 1);
        bins[idx].counts[r.prediction] += 1;
    }
    Ok(bins)
}

/// Documents predicted per topic.
pub fn topic_counts(rows: &[DocTopicRow], k: usize) -> Vec<usize> {
    let mut counts = vec![0; k];
    for r in rows {
        counts[r.prediction] += 1;
    }
    counts
}
