//! JSON checkpoint of a trained model together with its corpus.
//!
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! save/load cycle reproduces α, β and every count bit for bit.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{Hyperparameters, Topic, TopicModel};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

pub const FORMAT: &str = "sparselda-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub hyper: Hyperparameters,
    pub sweeps: usize,
    pub k: usize,
    pub vocab_size: usize,
    pub corpus: Corpus,
    pub z: Vec<Vec<Topic>>,
    pub n_td: Vec<u32>,
    pub n_wt: Vec<u32>,
    pub n_t: Vec<u32>,
}

impl Checkpoint {
    pub fn capture(model: &TopicModel, corpus: &Corpus) -> Self {
        let (n_td, n_wt, n_t) = model.raw_tables();
        Checkpoint {
            format: FORMAT.into(),
            version: VERSION,
            hyper: model.hyper().clone(),
            sweeps: model.sweeps(),
            k: model.k(),
            vocab_size: model.vocab_size(),
            corpus: corpus.clone(),
            z: model.assignments().to_vec(),
            n_td: n_td.to_vec(),
            n_wt: n_wt.to_vec(),
            n_t: n_t.to_vec(),
        }
    }

    /// Rebuilds the model, rejecting files whose stored counts disagree
    /// with their assignments.
    pub fn restore(self) -> Result<(Corpus, TopicModel)> {
        if self.format != FORMAT || self.version != VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported format {:?} version {}",
                self.format, self.version
            )));
        }
        if self.k != self.hyper.k() || self.vocab_size != self.corpus.vocab_size() {
            return Err(Error::Checkpoint("header dimensions disagree with contents".into()));
        }
        let mut model = TopicModel::from_assignments(&self.corpus, self.z, self.hyper)?;
        let (n_td, n_wt, n_t) = model.raw_tables();
        if n_td != self.n_td.as_slice() || n_wt != self.n_wt.as_slice() || n_t != self.n_t.as_slice() {
            return Err(Error::Checkpoint("stored counts do not match assignments".into()));
        }
        model.set_sweeps(self.sweeps);
        Ok((self.corpus, model))
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut out, self)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{train, Engine};
    use crate::sampler::synth::{generate_corpus, SyntheticConfig};

    #[test]
    fn roundtrip_is_exact() {
        let s = generate_corpus(&SyntheticConfig {
            k: 3,
            vocab_size: 20,
            docs: 10,
            doc_length: 8,
            alpha: 0.4,
            beta: 0.1,
            seed: 3,
        })
        .unwrap();
        let hyper = Hyperparameters::symmetric(3, 0.1 / 3.0, 0.07).with_iterations(20).with_opt_interval(5);
        let trained = train(&s.corpus, &hyper, Engine::Sparse).unwrap();

        let dir = std::env::temp_dir().join(format!("sparselda-ckpt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("model.json");
        let ck = Checkpoint::capture(&trained.model, &s.corpus);
        ck.write_to(&path).unwrap();
        let back = Checkpoint::read_from(&path).unwrap();
        assert_eq!(back, ck);
        let (corpus, model) = back.restore().unwrap();
        assert_eq!(corpus, s.corpus);
        assert_eq!(model, trained.model);
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn tampered_counts_rejected() {
        let s = generate_corpus(&SyntheticConfig {
            k: 2,
            vocab_size: 5,
            docs: 3,
            doc_length: 4,
            alpha: 1.0,
            beta: 1.0,
            seed: 1,
        })
        .unwrap();
        let hyper = Hyperparameters::symmetric(2, 1.0, 0.1).with_iterations(1);
        let trained = train(&s.corpus, &hyper, Engine::Naive).unwrap();
        let mut ck = Checkpoint::capture(&trained.model, &s.corpus);
        ck.n_t[0] += 1;
        assert!(matches!(ck.restore(), Err(Error::Checkpoint(_))));
    }
}
