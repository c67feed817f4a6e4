//! Asymmetric α re-estimation from document-topic counts.

use statrs::function::gamma::digamma;

use super::model::TopicModel;

/// One digamma fixed-point step for a Dirichlet-multinomial prior:
///
/// ```text
/// α_t ← α_t · Σ_d [ψ(n_td + α_t) − ψ(α_t)] / Σ_d [ψ(N_d + Σα) − ψ(Σα)]
/// ```
///
/// `doc_counts` yields one row of k topic counts per document. Returns
/// `None` when the step produces a non-finite or non-positive value.
pub fn fixed_point_step<'a, I>(alpha: &[f64], doc_counts: I) -> Option<Vec<f64>>
where
    I: IntoIterator<Item = &'a [u32]>,
{
    let k = alpha.len();
    let alpha_sum: f64 = alpha.iter().sum();
    let psi_alpha: Vec<f64> = alpha.iter().map(|&a| digamma(a)).collect();
    let psi_sum = digamma(alpha_sum);

    let mut numer = vec![0.0; k];
    let mut denom = 0.0;
    for row in doc_counts {
        let len: u32 = row.iter().sum();
        denom += digamma(len as f64 + alpha_sum) - psi_sum;
        for t in 0..k {
            if row[t] > 0 {
                numer[t] += digamma(row[t] as f64 + alpha[t]) - psi_alpha[t];
            }
        }
    }
    let updated: Vec<f64> = alpha.iter().zip(&numer).map(|(&a, &n)| a * n / denom).collect();
    updated.iter().all(|a| a.is_finite() && *a > 0.0).then_some(updated)
}

/// Fixed-point update of the model's α; β is left alone. On a degenerate
/// step the current α is returned unchanged and a warning logged.
pub fn optimize_alpha(model: &TopicModel) -> Vec<f64> {
    let rows = (0..model.num_docs()).map(|d| model.doc_counts(d));
    match fixed_point_step(model.alpha(), rows) {
        Some(a) => a,
        None => {
            log::warn!("alpha update degenerate (unused topic or empty documents); keeping previous alpha");
            model.alpha().to_vec()
        }
    }
}
