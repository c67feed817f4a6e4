//! Command-line and environment configuration.
//!
//! Every flag can also be set through an environment variable named
//! `SPARSELDA_` followed by the flag in upper snake case, e.g.
//! `SPARSELDA_ITERATIONS=500` or `SPARSELDA_OUT_DIR=out`. Flags win over
//! the environment.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sparselda::diagnostics::{DEFAULT_EPSILON, DEFAULT_TOP_WORDS};
use sparselda::retrieval::{DEFAULT_LAMBDA, DEFAULT_MU};
use sparselda::sampler::{Engine, DEFAULT_ITERATIONS, DEFAULT_OPT_INTERVAL};

use crate::error::CliError;

#[derive(Debug, Clone, Parser)]
#[command(name = "sparselda", version, about = "LDA topic modelling of short texts with a SparseLDA Gibbs sampler")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Clean, tokenize and encode a corpus without training.
    Preprocess {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Train one model and write assignments, topics, diagnostics and a checkpoint.
    Train {
        #[command(flatten)]
        input: InputArgs,
        /// Number of topics.
        #[arg(long, env = "SPARSELDA_K")]
        k: usize,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[command(flatten)]
        report: ReportArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Train one model per k and pick the k with the highest average coherence.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, env = "SPARSELDA_K_MIN", default_value_t = 2)]
        k_min: usize,
        #[arg(long, env = "SPARSELDA_K_MAX", default_value_t = 50)]
        k_max: usize,
        /// Concurrent training jobs (0 = one per core).
        #[arg(long, env = "SPARSELDA_WORKERS", default_value_t = 0)]
        workers: usize,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[command(flatten)]
        report: ReportArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Recompute topic diagnostics and confidence summaries from a checkpoint.
    Diagnose {
        #[arg(long, env = "SPARSELDA_CHECKPOINT")]
        checkpoint: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rank the checkpoint's documents for each query in a file.
    Score {
        #[arg(long, env = "SPARSELDA_CHECKPOINT")]
        checkpoint: PathBuf,
        /// One query per line.
        #[arg(long, env = "SPARSELDA_QUERIES")]
        queries: PathBuf,
        #[command(flatten)]
        text: TextArgs,
        #[arg(long, env = "SPARSELDA_MU", default_value_t = DEFAULT_MU)]
        mu: f64,
        #[arg(long, env = "SPARSELDA_LAMBDA", default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write a synthetic corpus drawn from planted topics.
    Generate {
        #[arg(long, env = "SPARSELDA_K")]
        k: usize,
        #[arg(long, env = "SPARSELDA_VOCAB_SIZE")]
        vocab_size: usize,
        #[arg(long, env = "SPARSELDA_DOCS")]
        docs: usize,
        #[arg(long, env = "SPARSELDA_DOC_LENGTH")]
        doc_length: usize,
        /// Dirichlet concentration of the planted θ.
        #[arg(long, env = "SPARSELDA_GEN_ALPHA", default_value_t = 0.5)]
        gen_alpha: f64,
        /// Dirichlet concentration of the planted φ.
        #[arg(long, env = "SPARSELDA_GEN_BETA", default_value_t = 0.05)]
        gen_beta: f64,
        #[arg(long, env = "SPARSELDA_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[arg(long, env = "SPARSELDA_INPUT")]
    pub input: PathBuf,
    /// Defaults to jsonl for .jsonl/.json files and csv otherwise.
    #[arg(long, env = "SPARSELDA_FORMAT", value_enum)]
    pub format: Option<InputFormat>,
    #[arg(long, env = "SPARSELDA_ID_COL", default_value = "id")]
    pub id_col: String,
    #[arg(long, env = "SPARSELDA_TEXT_COL", default_value = "text")]
    pub text_col: String,
    #[command(flatten)]
    pub text: TextArgs,
}

impl InputArgs {
    pub fn resolved_format(&self) -> InputFormat {
        self.format.unwrap_or_else(|| match self.input.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json" | "ndjson") => InputFormat::Jsonl,
            _ => InputFormat::Csv,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct TextArgs {
    /// Stopword file, one word per line; the embedded English list otherwise.
    #[arg(long, env = "SPARSELDA_STOPWORDS")]
    pub stopwords: Option<PathBuf>,
    #[arg(long, env = "SPARSELDA_NO_STEM")]
    pub no_stem: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SamplerArgs {
    #[arg(long, env = "SPARSELDA_ITERATIONS", default_value_t = DEFAULT_ITERATIONS)]
    pub iterations: usize,
    /// Sweeps between α updates (0 disables them).
    #[arg(long, env = "SPARSELDA_OPT_INTERVAL", default_value_t = DEFAULT_OPT_INTERVAL)]
    pub opt_interval: usize,
    #[arg(long, env = "SPARSELDA_CHAINS", default_value_t = 1)]
    pub chains: usize,
    #[arg(long, env = "SPARSELDA_ENGINE", default_value_t = Engine::Sparse, value_parser = parse_engine)]
    pub engine: Engine,
    #[arg(long, env = "SPARSELDA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Initial symmetric α; 50/k when omitted.
    #[arg(long, env = "SPARSELDA_ALPHA")]
    pub alpha: Option<f64>,
    /// Fixed β; 50/V when omitted.
    #[arg(long, env = "SPARSELDA_BETA")]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long, env = "SPARSELDA_TOP_WORDS", default_value_t = DEFAULT_TOP_WORDS)]
    pub top_words: usize,
    #[arg(long, env = "SPARSELDA_EPSILON", default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Width of the confidence histogram bins.
    #[arg(long, env = "SPARSELDA_BIN_WIDTH", default_value_t = 0.1)]
    pub bin_width: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, env = "SPARSELDA_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: sparselda::Error| e.to_string())
}

fn require_file(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::MissingInput(format!("{what} {} not found", path.display())))
    }
}

fn usage(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Usage(msg()))
    }
}

impl TextArgs {
    fn validate(&self) -> Result<(), CliError> {
        match &self.stopwords {
            Some(p) => require_file(p, "stopword file"),
            None => Ok(()),
        }
    }
}

impl InputArgs {
    fn validate(&self) -> Result<(), CliError> {
        require_file(&self.input, "input")?;
        self.text.validate()
    }
}

impl SamplerArgs {
    fn validate(&self) -> Result<(), CliError> {
        usage(self.iterations > 0, || "--iterations must be positive".into())?;
        usage(self.chains > 0, || "--chains must be positive".into())?;
        if let Some(a) = self.alpha {
            usage(a.is_finite() && a > 0.0, || format!("--alpha must be positive, got {a}"))?;
        }
        if let Some(b) = self.beta {
            usage(b.is_finite() && b > 0.0, || format!("--beta must be positive, got {b}"))?;
        }
        Ok(())
    }
}

impl ReportArgs {
    fn validate(&self) -> Result<(), CliError> {
        usage(self.top_words >= 2, || "--top-words must be at least 2".into())?;
        usage(self.epsilon.is_finite() && self.epsilon > 0.0, || "--epsilon must be positive".into())?;
        usage(self.bin_width > 0.0 && self.bin_width <= 1.0, || "--bin-width must lie in (0, 1]".into())
    }
}

impl RunConfig {
    /// Checks flag combinations and that every input path exists, before
    /// any work starts.
    pub fn validate(&self) -> Result<(), CliError> {
        match &self.command {
            Command::Preprocess { input, .. } => input.validate(),
            Command::Train { input, k, sampler, report, .. } => {
                input.validate()?;
                usage(*k >= 1, || "--k must be at least 1".into())?;
                sampler.validate()?;
                report.validate()
            }
            Command::Sweep { input, k_min, k_max, sampler, report, .. } => {
                input.validate()?;
                usage(1 <= *k_min && k_min <= k_max, || format!("need 1 <= --k-min <= --k-max, got {k_min}..{k_max}"))?;
                usage(sampler.alpha.is_none(), || "--alpha is fixed to 50/k during a sweep".into())?;
                sampler.validate()?;
                report.validate()
            }
            Command::Diagnose { checkpoint, report, .. } => {
                require_file(checkpoint, "checkpoint")?;
                report.validate()
            }
            Command::Score { checkpoint, queries, text, mu, lambda, .. } => {
                require_file(checkpoint, "checkpoint")?;
                require_file(queries, "query file")?;
                text.validate()?;
                usage(mu.is_finite() && *mu >= 0.0, || format!("--mu must be non-negative, got {mu}"))?;
                usage((0.0..=1.0).contains(lambda), || format!("--lambda must lie in [0, 1], got {lambda}"))
            }
            Command::Generate { k, vocab_size, docs, doc_length, gen_alpha, gen_beta, .. } => {
                usage(*k > 0 && *vocab_size > 0 && *docs > 0 && *doc_length > 0, || "generator sizes must be positive".into())?;
                usage(*gen_alpha > 0.0 && *gen_beta > 0.0, || "generator concentrations must be positive".into())
            }
        }
    }

    pub fn out_dir(&self) -> &Path {
        match &self.command {
            Command::Preprocess { output, .. }
            | Command::Train { output, .. }
            | Command::Sweep { output, .. }
            | Command::Diagnose { output, .. }
            | Command::Score { output, .. }
            | Command::Generate { output, .. } => &output.out_dir,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("sparselda").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn train_defaults() {
        let cfg = parse(&["train", "--input", "x.csv", "--k", "4"]);
        let Command::Train { sampler, report, input, output, .. } = cfg.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(sampler.iterations, 1000);
        assert_eq!(sampler.opt_interval, 10);
        assert_eq!(sampler.chains, 1);
        assert_eq!(sampler.engine, Engine::Sparse);
        assert_eq!(report.top_words, 10);
        assert_eq!(report.epsilon, 1e-12);
        assert_eq!(input.resolved_format(), InputFormat::Csv);
        assert_eq!((input.id_col.as_str(), input.text_col.as_str()), ("id", "text"));
        assert!(!input.text.no_stem);
        assert_eq!(output.out_dir, PathBuf::from("out"));
    }

    #[test]
    fn sweep_and_score_defaults() {
        let Command::Sweep { k_min, k_max, .. } = parse(&["sweep", "--input", "x.jsonl"]).command else {
            panic!()
        };
        assert_eq!((k_min, k_max), (2, 50));
        let Command::Score { mu, lambda, .. } = parse(&["score", "--checkpoint", "m.json", "--queries", "q.txt"]).command else {
            panic!()
        };
        assert_eq!((mu, lambda), (DEFAULT_MU, DEFAULT_LAMBDA));
    }

    #[test]
    fn format_inferred_from_extension() {
        let Command::Preprocess { input, .. } = parse(&["preprocess", "--input", "tweets.jsonl"]).command else {
            panic!()
        };
        assert_eq!(input.resolved_format(), InputFormat::Jsonl);
        let Command::Preprocess { input, .. } = parse(&["preprocess", "--input", "tweets.txt", "--format", "jsonl"]).command else {
            panic!()
        };
        assert_eq!(input.resolved_format(), InputFormat::Jsonl);
    }

    #[test]
    fn bad_engine_is_a_parse_error() {
        assert!(RunConfig::try_parse_from(["sparselda", "train", "--input", "x", "--k", "2", "--engine", "fast"]).is_err());
    }

    #[test]
    fn missing_input_detected_before_work() {
        let cfg = parse(&["train", "--input", "/definitely/not/here.csv", "--k", "2"]);
        assert!(matches!(cfg.validate(), Err(CliError::MissingInput(_))));
    }

    #[test]
    fn bad_ranges_are_usage_errors() {
        let dir = std::env::temp_dir();
        let f = dir.join(format!("sparselda-cfg-{}.csv", std::process::id()));
        std::fs::write(&f, "id,text\n").unwrap();
        let p = f.to_str().unwrap();
        for args in [
            vec!["sweep", "--input", p, "--k-min", "5", "--k-max", "3"],
            vec!["train", "--input", p, "--k", "0"],
            vec!["train", "--input", p, "--k", "2", "--top-words", "1"],
            vec!["sweep", "--input", p, "--alpha", "0.1"],
        ] {
            assert!(matches!(parse(&args).validate(), Err(CliError::Usage(_))), "{args:?}");
        }
        std::fs::remove_file(f).unwrap();
    }
}
