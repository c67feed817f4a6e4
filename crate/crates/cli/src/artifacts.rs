//! Writers for every file the CLI emits. Column orders are fixed; floats go
//! through [`fmt_float`].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sparselda::corpus::{Corpus, DroppedDocument, RecordError};
use sparselda::diagnostics::{ConfidenceStats, HistogramBin, TopicReport};
use sparselda::sampler::{DocTopicRow, Synthetic};
use sparselda::selection::SweepResult;

use crate::error::CliError;
use crate::format::fmt_float;

pub const ASSIGNMENTS: &str = "assignments.csv";
pub const TOPICS: &str = "topics.json";
pub const DIAGNOSTICS: &str = "diagnostics.csv";
pub const STATS: &str = "stats.csv";
pub const HISTOGRAM: &str = "histogram.csv";
pub const COUNTS: &str = "counts.csv";
pub const SWEEP: &str = "sweep.csv";
pub const DROPPED: &str = "dropped.csv";
pub const REJECTED: &str = "rejected.csv";
pub const CHECKPOINT: &str = "model.json";
pub const SCORES: &str = "scores.tsv";
pub const TOKENS: &str = "tokens.csv";
pub const VOCABULARY: &str = "vocabulary.csv";
pub const SYNTHETIC_CORPUS: &str = "corpus.csv";
pub const PLANTED_THETA: &str = "planted_theta.csv";
pub const PLANTED_PHI: &str = "planted_phi.csv";

/// Column in sweep.csv that holds wall-clock time and so differs between
/// otherwise identical runs.
pub const TIMING_COLUMN: &str = "wall_time_ms";

type Csv = csv::Writer<File>;

fn csv_writer(dir: &Path, name: &str, delimiter: u8) -> Result<(Csv, PathBuf), CliError> {
    let path = dir.join(name);
    let w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_path(&path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Io { path: path.clone(), source: io },
            other => CliError::Data(format!("{other:?}")),
        })?;
    Ok((w, path))
}

fn finish(mut w: Csv, path: PathBuf) -> Result<PathBuf, CliError> {
    w.flush().map_err(CliError::io(&path))?;
    Ok(path)
}

pub fn write_assignments(dir: &Path, rows: &[DocTopicRow], k: usize) -> Result<PathBuf, CliError> {
    let (mut w, path) = csv_writer(dir, ASSIGNMENTS, b',')?;
    let mut header = vec!["doc_id".to_owned(), "prediction".to_owned()];
    header.extend((0..k).map(|t| format!("confidence_topic_{t}")));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.doc_id.clone(), r.prediction.to_string()];
        rec.extend(r.confidences.iter().map(|&c| fmt_float(c)));
        w.write_record(&rec)?;
    }
    finish(w, path)
}

#[derive(Serialize)]
struct TopicWords<'a> {
    topic: usize,
    words: Vec<WordWeight<'a>>,
}

#[derive(Serialize)]
struct WordWeight<'a> {
    word: &'a str,
    weight: f64,
}

pub fn write_topics_json(dir: &Path, reports: &[TopicReport]) -> Result<PathBuf, CliError> {
    let path = dir.join(TOPICS);
    let topics: Vec<TopicWords> = reports
        .iter()
        .map(|r| TopicWords {
            topic: r.topic,
            words: r
                .top_words
                .iter()
                .map(|(word, weight)| WordWeight { word, weight: *weight })
                .collect(),
        })
        .collect();
    let file = File::create(&path).map_err(CliError::io(&path))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, &topics)?;
    writeln!(out).and_then(|_| out.flush()).map_err(CliError::io(&path))?;
    Ok(path)
}

pub fn write_diagnostics(dir: &Path, reports: &[TopicReport]) -> Result<PathBuf, CliError> {
    let (mut w, path) = csv_writer(dir, DIAGNOSTICS, b',')?;
    w.write_record(["topic", "coherence", "exclusivity", "document_entropy", "tokens", "avg_word_length", "top_words"])?;
    for r in reports {
        let words: Vec<&str> = r.top_words.iter().map(|(w, _)| w.as_str()).collect();
        w.write_record([
            r.topic.to_string(),
            fmt_float(r.coherence),
            fmt_float(r.exclusivity),
            fmt_float(r.document_entropy),
            r.tokens.to_string(),
            fmt_float(r.avg_word_length),
            words.join(" "),
        ])?;
    }
    finish(w, path)
}

pub fn write_stats(dir: &Path, stats: &ConfidenceStats) -> Result<PathBuf, CliError> {
    let (mut w, path) = csv_writer(dir, STATS, b',')?;
    w.write_record(["topic", "min", "max", "mean", "std"])?;
    for (t, s) in stats.topics.iter().enumerate() {
        w.write_record([t.to_string(), fmt_float(s.min), fmt_float(s.max), fmt_float(s.mean), fmt_float(s.std)])?;
    }
    finish(w, path)
}

/// `histograms[t]` bins the confidence column of topic `t`.
pub fn write_histogram(dir: &Path, histograms: &[Vec<HistogramBin>]) -> Result<PathBuf, CliError> {
    let (mut w, path) = csv_writer(dir, HISTOGRAM, b',')?;
    w.write_record(["confidence_topic", "bin_lo", "bin_hi", "predicted_topic", "count"])?;
    for (t, bins) in histograms.iter().enumerate() {
        for b in bins {
            for (p, &n) in b.counts.iter().enumerate() {
                w.write_record([t.to_string(), fmt_float(b.lo), fmt_float(b.hi), p.to_string(), n.to_string()])?;
            }
        }
    }
    finish(w, path)
}

pub fn write_counts(dir: &Path, counts: &[usize]) -> Result<PathBuf, CliError> {
    let (mut w, path) = csv_writer(dir, COUNTS, b',')?;
    w.write_record(["topic", "documents"])?;
    for (t, n) in counts.iter().enumerate() {
        w.write_record([t.to_string(), n.to_string()])?;
    }
    finish(w, path)
}

pub fn write_sweep(dir: &Path, sweep: &SweepResult) -> Result<PathBuf, CliError> {
    let (mut w, path) = csv_writer(dir, SWEEP, b',')?;
    w.write_record(["k", "avg_coherence", TIMING_COLUMN, "seed"])?;
    for r in &sweep.rows {
        let coherence = r.average_coherence.as_ref().map_or_else(|_| "NaN".to_owned(), |&c| fmt_float(c));
        w.write_record([r.k.to_string(), coherence, r.wall_time.as_millis().to_string(), r.seed.to_string()])?;
    }
    finish(w, path)
}

pub fn write_dropped(dir: &Path, dropped: &[DroppedDocument]) -> Result<PathBuf, CliError> {
    let (mut w, path) = csv_writer(dir, DROPPED, b',')?;
    w.write_record(["doc_id", "reason"])?;
    for d in dropped {
        w.write_record([&d.id, &d.reason])?;
    }
    finish(w, path)
}

pub fn write_rejected(dir: &Path, failures: &[RecordError]) -> Result<PathBuf, CliError> {
    let (mut w, path) = csv_writer(dir, REJECTED, b',')?;
    w.write_record(["record", "doc_id", "message"])?;
    for f in failures {
        w.write_record([f.record.to_string(), f.doc_id.clone().unwrap_or_default(), f.message.clone()])?;
    }
    finish(w, path)
}

pub fn write_tokens(dir: &Path, corpus: &Corpus) -> Result<PathBuf, CliError> {
    let (mut w, path) = csv_writer(dir, TOKENS, b',')?;
    w.write_record(["doc_id", "tokens"])?;
    for doc in corpus.docs() {
        let words: Vec<&str> = doc.tokens.iter().map(|&t| corpus.vocab().word(t)).collect();
        w.write_record([doc.id.as_str(), &words.join(" ")])?;
    }
    finish(w, path)
}

pub fn write_vocabulary(dir: &Path, corpus: &Corpus) -> Result<PathBuf, CliError> {
    let (mut w, path) = csv_writer(dir, VOCABULARY, b',')?;
    w.write_record(["word_id", "word", "document_frequency"])?;
    for (id, (word, df)) in corpus.vocab().words().iter().zip(corpus.document_frequencies()).enumerate() {
        w.write_record([id.to_string(), word.clone(), df.to_string()])?;
    }
    finish(w, path)
}

/// One row per (query, document), best first within each query.
pub fn write_scores(dir: &Path, scored: &[(String, Vec<(String, f64)>)]) -> Result<PathBuf, CliError> {
    let (mut w, path) = csv_writer(dir, SCORES, b'\t')?;
    w.write_record(["query", "doc_id", "score"])?;
    for (query, ranking) in scored {
        for (doc_id, score) in ranking {
            w.write_record([query.as_str(), doc_id, &fmt_float(*score)])?;
        }
    }
    finish(w, path)
}

/// The synthetic corpus as `id,text` rows (readable by every other
/// subcommand) plus the planted θ and φ.
pub fn write_synthetic(dir: &Path, s: &Synthetic) -> Result<Vec<PathBuf>, CliError> {
    let vocab = s.corpus.vocab();
    let (mut w, corpus_path) = csv_writer(dir, SYNTHETIC_CORPUS, b',')?;
    w.write_record(["id", "text"])?;
    for doc in s.corpus.docs() {
        let words: Vec<&str> = doc.tokens.iter().map(|&t| vocab.word(t)).collect();
        w.write_record([doc.id.as_str(), &words.join(" ")])?;
    }
    let corpus_path = finish(w, corpus_path)?;

    let k = s.phi.len();
    let (mut w, theta_path) = csv_writer(dir, PLANTED_THETA, b',')?;
    let mut header = vec!["doc_id".to_owned()];
    header.extend((0..k).map(|t| format!("topic_{t}")));
    w.write_record(&header)?;
    for (doc, theta) in s.corpus.docs().iter().zip(&s.theta) {
        let mut rec = vec![doc.id.clone()];
        rec.extend(theta.iter().map(|&x| fmt_float(x)));
        w.write_record(&rec)?;
    }
    let theta_path = finish(w, theta_path)?;

    let (mut w, phi_path) = csv_writer(dir, PLANTED_PHI, b',')?;
    w.write_record(["topic", "word", "weight"])?;
    for (t, row) in s.phi.iter().enumerate() {
        for (id, &p) in row.iter().enumerate() {
            w.write_record([t.to_string(), vocab.words()[id].clone(), fmt_float(p)])?;
        }
    }
    let phi_path = finish(w, phi_path)?;
    Ok(vec![corpus_path, theta_path, phi_path])
}
