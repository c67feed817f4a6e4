//! Reference sampler: every topic's full conditional weight is evaluated
//! for every token.

use rand::Rng;

use super::model::{Topic, TopicModel};
use crate::corpus::{Corpus, WordId};

/// Unnormalised full conditional of topic `t` for word `w` in document `d`:
/// (α_t + n_{t|d})(β + n_{w|t}) / (βV + n_{·|t}).
///
/// The token being resampled must already be removed from the counts.
#[inline]
pub fn gibbs_weight_naive(model: &TopicModel, d: usize, w: WordId, t: usize) -> f64 {
    (model.alpha()[t] + model.n_td(d, t) as f64) * (model.beta() + model.n_wt(w, t) as f64)
        / (model.beta_v() + model.n_t(t) as f64)
}

/// Order in which the inverse CDF visits the probability mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TermOrder {
    /// One term per topic, ascending topic index.
    #[default]
    Flat,
    /// The three-bucket split used by the sparse engine: all smoothing terms
    /// (ascending topic), then document terms over topics with
    /// n_{t|d} > 0 (ascending topic), then topic-word terms over topics with
    /// n_{w|t} > 0 in descending count order (ties by ascending topic).
    ///
    /// With a shared uniform stream this reproduces the sparse engine draw
    /// for draw, while computing every term from the raw counts.
    Bucketed,
}

#[derive(Debug, Clone, Default)]
pub struct NaiveSampler {
    order: TermOrder,
    weights: Vec<f64>,
    word_order: Vec<(Topic, u32)>,
}

impl NaiveSampler {
    pub fn new(order: TermOrder) -> Self {
        NaiveSampler {
            order,
            ..Default::default()
        }
    }

    pub fn order(&self) -> TermOrder {
        self.order
    }

    /// One Gibbs sweep in corpus order, one uniform draw per token.
    pub fn sweep<R: Rng>(&mut self, model: &mut TopicModel, corpus: &Corpus, rng: &mut R) {
        self.sweep_observed(model, corpus, rng, &mut |_, _, _| {});
    }

    /// As [`sweep`](Self::sweep), calling `on_assign(doc, position, topic)`
    /// after each token is placed.
    pub fn sweep_observed<R: Rng, F: FnMut(usize, usize, Topic)>(
        &mut self,
        model: &mut TopicModel,
        corpus: &Corpus,
        rng: &mut R,
        on_assign: &mut F,
    ) {
        for (d, doc) in corpus.docs().iter().enumerate() {
            for (i, &w) in doc.tokens.iter().enumerate() {
                let old = model.z(d)[i];
                model.unassign(d, w, old);
                let u: f64 = rng.random();
                let t = match self.order {
                    TermOrder::Flat => self.draw_flat(model, d, w, u),
                    TermOrder::Bucketed => self.draw_bucketed(model, d, w, u),
                };
                model.assign(d, i, w, t);
                on_assign(d, i, t);
            }
        }
        model.finish_sweep();
    }

    fn draw_flat(&mut self, model: &TopicModel, d: usize, w: WordId, u: f64) -> Topic {
        let k = model.k();
        self.weights.clear();
        let mut total = 0.0;
        for t in 0..k {
            let wt = gibbs_weight_naive(model, d, w, t);
            total += wt;
            self.weights.push(wt);
        }
        let target = u * total;
        let mut cum = 0.0;
        for (t, &wt) in self.weights.iter().enumerate() {
            cum += wt;
            if target < cum {
                return t as Topic;
            }
        }
        (k - 1) as Topic
    }

    fn draw_bucketed(&mut self, model: &TopicModel, d: usize, w: WordId, u: f64) -> Topic {
        let k = model.k();
        let (alpha, beta, beta_v) = (model.alpha(), model.beta(), model.beta_v());
        let denom = |t: usize| beta_v + model.n_t(t) as f64;

        let s: f64 = (0..k).map(|t| alpha[t] * beta / denom(t)).sum();
        let r: f64 = (0..k).map(|t| model.n_td(d, t) as f64 * beta / denom(t)).sum();

        self.word_order.clear();
        self.word_order.extend(
            model
                .word_counts(w)
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(t, &c)| (t as Topic, c)),
        );
        self.word_order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        // same association as the sparse coefficient cache, (α + n)·(1/denom)
        let word_term = |t: usize, c: u32| (alpha[t] + model.n_td(d, t) as f64) * (1.0 / denom(t)) * c as f64;
        let q: f64 = self.word_order.iter().map(|&(t, c)| word_term(t as usize, c)).sum();

        let mut target = u * (s + r + q);
        if target < s {
            let mut cum = 0.0;
            for t in 0..k {
                cum += alpha[t] * beta / denom(t);
                if target < cum {
                    return t as Topic;
                }
            }
            return (k - 1) as Topic;
        }
        target -= s;
        if target < r {
            let mut cum = 0.0;
            let mut last = 0;
            for t in (0..k).filter(|&t| model.n_td(d, t) > 0) {
                cum += model.n_td(d, t) as f64 * beta / denom(t);
                last = t;
                if target < cum {
                    return t as Topic;
                }
            }
            return last as Topic;
        }
        target -= r;
        let mut cum = 0.0;
        for &(t, c) in &self.word_order {
            cum += word_term(t as usize, c);
            if target < cum {
                return t;
            }
        }
        match self.word_order.last() {
            Some(&(t, _)) => t,
            // rounding pushed the target past an empty word bucket
            None => (0..k).rev().find(|&t| model.n_td(d, t) > 0).unwrap_or(0) as Topic,
        }
    }
}
