//! Planted-topic corpora drawn from the LDA generative process.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::rng::chain_rng;
use crate::corpus::{Corpus, Document, Vocabulary, WordId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub k: usize,
    pub vocab_size: usize,
    pub docs: usize,
    pub doc_length: usize,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub corpus: Corpus,
    /// `theta[d][t]`
    pub theta: Vec<Vec<f64>>,
    /// `phi[t][w]`
    pub phi: Vec<Vec<f64>>,
}

/// Name of synthetic word `i`: "zq" followed by `i` in base 16 over
/// consonants, so the string survives cleaning, stoplists and stemming
/// unchanged.
pub fn synthetic_word(i: usize) -> String {
    const DIGITS: &[u8; 16] = b"bcdfghjklmnprtvx";
    let mut tail = Vec::new();
    let mut n = i;
    loop {
        tail.push(DIGITS[n % 16]);
        n /= 16;
        if n == 0 {
            break;
        }
    }
    tail.reverse();
    format!("zq{}", String::from_utf8(tail).unwrap())
}

/// Symmetric Dirichlet draw via normalised Gamma variates, in log space so
/// very small concentrations do not underflow to an all-zero vector.
fn dirichlet<R: Rng>(rng: &mut R, dim: usize, conc: f64) -> Vec<f64> {
    if dim == 1 {
        return vec![1.0];
    }
    // G(a) = G(a + 1) · U^(1/a)
    let boosted = Gamma::new(conc + 1.0, 1.0).expect("positive concentration");
    let logs: Vec<f64> = (0..dim)
        .map(|_| {
            let g: f64 = boosted.sample(rng);
            let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            g.ln() + u.ln() / conc
        })
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let unnorm: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = unnorm.iter().sum();
    unnorm.into_iter().map(|x| x / sum).collect()
}

fn categorical<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return i;
        }
    }
    probs.len() - 1
}

/// φ_t ~ Dir(β) for each topic, θ_d ~ Dir(α) for each document, then per
/// token z ~ θ_d and w ~ φ_z.
pub fn generate_corpus(cfg: &SyntheticConfig) -> Result<Synthetic> {
    let positive = cfg.alpha.is_finite() && cfg.alpha > 0.0 && cfg.beta.is_finite() && cfg.beta > 0.0;
    if cfg.k == 0 || cfg.vocab_size == 0 || cfg.docs == 0 || cfg.doc_length == 0 || !positive {
        return Err(Error::InvalidParameter(format!("synthetic corpus parameters must be positive: {cfg:?}")));
    }
    let mut rng = chain_rng(cfg.seed, 0);
    let phi: Vec<Vec<f64>> = (0..cfg.k).map(|_| dirichlet(&mut rng, cfg.vocab_size, cfg.beta)).collect();
    let mut theta = Vec::with_capacity(cfg.docs);
    let mut docs = Vec::with_capacity(cfg.docs);
    for d in 0..cfg.docs {
        let th = dirichlet(&mut rng, cfg.k, cfg.alpha);
        let tokens = (0..cfg.doc_length)
            .map(|_| {
                let z = categorical(&mut rng, &th);
                categorical(&mut rng, &phi[z]) as WordId
            })
            .collect();
        theta.push(th);
        docs.push(Document {
            id: format!("doc{d}"),
            tokens,
        });
    }
    let vocab = Vocabulary::from((0..cfg.vocab_size).map(synthetic_word).collect::<Vec<_>>());
    Ok(Synthetic {
        corpus: Corpus::from_encoded(docs, vocab),
        theta,
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_corpus, Pipeline, RawDocument};

    fn cfg(k: usize) -> SyntheticConfig {
        SyntheticConfig {
            k,
            vocab_size: 30,
            docs: 20,
            doc_length: 15,
            alpha: 0.5,
            beta: 0.1,
            seed: 17,
        }
    }

    #[test]
    fn single_topic_theta_is_one() {
        let s = generate_corpus(&cfg(1)).unwrap();
        assert!(s.theta.iter().all(|t| t == &vec![1.0]));
        assert_eq!(s.corpus.total_tokens(), 20 * 15);
    }

    #[test]
    fn same_seed_same_corpus() {
        let a = generate_corpus(&cfg(3)).unwrap();
        let b = generate_corpus(&cfg(3)).unwrap();
        assert_eq!(a.corpus, b.corpus);
        assert_eq!(a.phi, b.phi);
    }

    #[test]
    fn distributions_normalised() {
        let s = generate_corpus(&SyntheticConfig { beta: 1e-3, ..cfg(4) }).unwrap();
        for row in s.phi.iter().chain(&s.theta) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|p| p.is_finite() && *p >= 0.0));
        }
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(generate_corpus(&SyntheticConfig { k: 0, ..cfg(1) }).is_err());
        assert!(generate_corpus(&SyntheticConfig { alpha: 0.0, ..cfg(1) }).is_err());
    }

    #[test]
    fn words_survive_the_text_pipeline() {
        let words: Vec<String> = (0..300).map(synthetic_word).collect();
        let raw = RawDocument::new("x", words.join(" "));
        let c = build_corpus(&[raw], &Pipeline::default());
        assert_eq!(c.vocab().words(), &words[..]);
    }
}
