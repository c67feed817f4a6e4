//! Subcommand pipelines: ingest → clean → tokenize → stopwords → stem →
//! LDA → artifacts.

use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sparselda::corpus::{build_corpus, default_stoplist, read_csv, read_jsonl, read_stoplist, Corpus, IngestReport, Pipeline};
use sparselda::diagnostics::{confidence_histogram, confidence_stats, topic_counts, topic_reports};
use sparselda::retrieval::{encode_query, RetrievalConfig, Scorer};
use sparselda::sampler::{generate_corpus, train, Checkpoint, DocTopicRow, Hyperparameters, SyntheticConfig, TopicModel};
use sparselda::selection::{coherence_sweep, SweepConfig};

use crate::artifacts::*;
use crate::config::{Command, InputArgs, InputFormat, ReportArgs, RunConfig, SamplerArgs, TextArgs};
use crate::error::CliError;

/// Result of a successful run, printed to stdout as one JSON line.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub documents: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dropped: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected_k: Option<usize>,
    pub artifacts: Vec<PathBuf>,
}

impl Summary {
    fn new(command: &'static str) -> Self {
        Summary {
            command,
            documents: None,
            vocabulary: None,
            dropped: None,
            rejected: None,
            selected_k: None,
            artifacts: Vec::new(),
        }
    }

    fn with_corpus(mut self, corpus: &Corpus) -> Self {
        self.documents = Some(corpus.num_docs());
        self.vocabulary = Some(corpus.vocab_size());
        self.dropped = Some(corpus.dropped().len());
        self
    }
}

/// Validates `config`, then executes its subcommand.
pub fn run(config: &RunConfig) -> Result<Summary, CliError> {
    config.validate()?;
    let out = config.out_dir();
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    match &config.command {
        Command::Preprocess { input, .. } => preprocess(input, out),
        Command::Train { input, k, sampler, report, .. } => train_cmd(input, *k, sampler, report, out),
        Command::Sweep { input, k_min, k_max, workers, sampler, report, .. } => {
            sweep_cmd(input, *k_min, *k_max, *workers, sampler, report, out)
        }
        Command::Diagnose { checkpoint, report, .. } => diagnose(checkpoint, report, out),
        Command::Score { checkpoint, queries, text, mu, lambda, .. } => score(checkpoint, queries, text, *mu, *lambda, out),
        Command::Generate { k, vocab_size, docs, doc_length, gen_alpha, gen_beta, seed, .. } => {
            let cfg = SyntheticConfig {
                k: *k,
                vocab_size: *vocab_size,
                docs: *docs,
                doc_length: *doc_length,
                alpha: *gen_alpha,
                beta: *gen_beta,
                seed: *seed,
            };
            let s = generate_corpus(&cfg)?;
            let mut summary = Summary::new("generate").with_corpus(&s.corpus);
            summary.artifacts = write_synthetic(out, &s)?;
            Ok(summary)
        }
    }
}

fn pipeline(text: &TextArgs) -> Result<Pipeline, CliError> {
    let stoplist = match &text.stopwords {
        Some(p) => read_stoplist(p).map_err(CliError::io(p))?,
        None => default_stoplist(),
    };
    Ok(Pipeline::new(stoplist, !text.no_stem))
}

fn ingest(input: &InputArgs) -> Result<IngestReport, CliError> {
    let path = &input.input;
    let file = File::open(path).map_err(CliError::io(path))?;
    let report = match input.resolved_format() {
        InputFormat::Csv => read_csv(file, &input.id_col, &input.text_col)?,
        InputFormat::Jsonl => read_jsonl(BufReader::new(file), &input.id_col, &input.text_col).map_err(CliError::io(path))?,
    };
    for f in &report.failures {
        log::warn!("record {} ({}) skipped: {}", f.record, f.doc_id.as_deref().unwrap_or("no id"), f.message);
    }
    if !report.failures.is_empty() {
        log::warn!("{} of {} records rejected", report.failures.len(), report.records());
    }
    if report.docs.is_empty() && !report.failures.is_empty() {
        return Err(CliError::Data(format!("all {} records of {} failed to parse", report.failures.len(), path.display())));
    }
    Ok(report)
}

/// Ingests and preprocesses the input, writing dropped.csv and
/// rejected.csv alongside.
fn load_corpus(input: &InputArgs, out: &Path, summary: &mut Summary) -> Result<Corpus, CliError> {
    let report = ingest(input)?;
    let corpus = build_corpus(&report.docs, &pipeline(&input.text)?);
    summary.artifacts.push(write_dropped(out, corpus.dropped())?);
    summary.artifacts.push(write_rejected(out, &report.failures)?);
    summary.rejected = Some(report.failures.len());
    if corpus.is_empty() {
        return Err(CliError::Data(format!("no document of {} has tokens left after preprocessing", input.input.display())));
    }
    Ok(corpus)
}

fn preprocess(input: &InputArgs, out: &Path) -> Result<Summary, CliError> {
    let mut summary = Summary::new("preprocess");
    let corpus = load_corpus(input, out, &mut summary)?;
    summary.artifacts.push(write_tokens(out, &corpus)?);
    summary.artifacts.push(write_vocabulary(out, &corpus)?);
    Ok(summary.with_corpus(&corpus))
}

fn hyperparameters(k: usize, vocab_size: usize, s: &SamplerArgs) -> Hyperparameters {
    let mut h = Hyperparameters::rule_of_fifty(k, vocab_size)
        .with_iterations(s.iterations)
        .with_opt_interval(s.opt_interval)
        .with_chains(s.chains)
        .with_seed(s.seed);
    if let Some(a) = s.alpha {
        h.alpha = vec![a; k];
    }
    if let Some(b) = s.beta {
        h.beta = b;
    }
    h
}

/// Topic reports, confidence summaries and their files.
fn write_reports(model: &TopicModel, corpus: &Corpus, rows: &[DocTopicRow], report: &ReportArgs, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let k = model.k();
    let reports = topic_reports(model, corpus, report.top_words, report.epsilon)?;
    let stats = confidence_stats(rows)?;
    let histograms = (0..k)
        .map(|t| confidence_histogram(rows, t, report.bin_width, k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(vec![
        write_assignments(out, rows, k)?,
        write_topics_json(out, &reports)?,
        write_diagnostics(out, &reports)?,
        write_stats(out, &stats)?,
        write_histogram(out, &histograms)?,
        write_counts(out, &topic_counts(rows, k))?,
    ])
}

fn train_cmd(input: &InputArgs, k: usize, sampler: &SamplerArgs, report: &ReportArgs, out: &Path) -> Result<Summary, CliError> {
    let mut summary = Summary::new("train");
    let corpus = load_corpus(input, out, &mut summary)?;
    let hyper = hyperparameters(k, corpus.vocab_size(), sampler);
    let trained = train(&corpus, &hyper, sampler.engine)?;
    if let Some(hits) = trained.hits {
        log::info!("topic-word bucket share of draws: {:.3}", hits.topic_word_fraction());
    }
    summary.artifacts.extend(write_reports(&trained.model, &corpus, &trained.rows, report, out)?);
    let path = out.join(CHECKPOINT);
    Checkpoint::capture(&trained.model, &corpus).write_to(&path)?;
    summary.artifacts.push(path);
    Ok(summary.with_corpus(&corpus))
}

fn sweep_cmd(
    input: &InputArgs,
    k_min: usize,
    k_max: usize,
    workers: usize,
    sampler: &SamplerArgs,
    report: &ReportArgs,
    out: &Path,
) -> Result<Summary, CliError> {
    let mut summary = Summary::new("sweep");
    let corpus = load_corpus(input, out, &mut summary)?;
    let cfg = SweepConfig {
        beta: sampler.beta,
        iterations: sampler.iterations,
        opt_interval: sampler.opt_interval,
        chains: sampler.chains,
        engine: sampler.engine,
        base_seed: sampler.seed,
        top_words: report.top_words,
        epsilon: report.epsilon,
        workers,
    };
    let result = coherence_sweep(&corpus, k_min, k_max, &cfg)?;
    summary.artifacts.push(write_sweep(out, &result)?);
    summary.selected_k = Some(result.best_k()?);
    Ok(summary.with_corpus(&corpus))
}

fn load_checkpoint(path: &Path) -> Result<(Corpus, TopicModel), CliError> {
    Ok(Checkpoint::read_from(path)?.restore()?)
}

fn diagnose(checkpoint: &Path, report: &ReportArgs, out: &Path) -> Result<Summary, CliError> {
    let (corpus, model) = load_checkpoint(checkpoint)?;
    let rows: Vec<DocTopicRow> = corpus
        .docs()
        .iter()
        .enumerate()
        .map(|(d, doc)| DocTopicRow::from_weights(doc.id.clone(), &model.estimate_theta(d)))
        .collect();
    let mut summary = Summary::new("diagnose").with_corpus(&corpus);
    summary.artifacts = write_reports(&model, &corpus, &rows, report, out)?;
    Ok(summary)
}

fn score(checkpoint: &Path, queries: &Path, text: &TextArgs, mu: f64, lambda: f64, out: &Path) -> Result<Summary, CliError> {
    let (corpus, model) = load_checkpoint(checkpoint)?;
    let pipeline = pipeline(text)?;
    let scorer = Scorer::new(&model, &corpus, RetrievalConfig { mu, lambda })?;
    let file = File::open(queries).map_err(CliError::io(queries))?;
    let mut scored = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(CliError::io(queries))?;
        let query = line.trim();
        if query.is_empty() {
            continue;
        }
        let encoded = encode_query(query, &pipeline, &corpus);
        if encoded.is_empty() {
            log::warn!("query {query:?} has no tokens after preprocessing");
        }
        let ranking = scorer
            .rank(&encoded)
            .into_iter()
            .map(|(d, s)| (corpus.doc(d).id.clone(), s))
            .collect();
        scored.push((query.to_owned(), ranking));
    }
    let mut summary = Summary::new("score").with_corpus(&corpus);
    summary.artifacts.push(write_scores(out, &scored)?);
    Ok(summary)
}
