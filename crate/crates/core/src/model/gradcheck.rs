use rand::seq::index::sample;

use super::batch::EncodedBatch;
use super::encoder::ScorerModel;
use crate::error::Result;
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub checked: usize,
    /// Flat index of the coordinate with the largest error.
    pub worst_index: usize,
}

/// Central difference `(L(θ+ε) − L(θ−ε)) / 2ε` at flat index `i`.
pub fn numeric_gradient(model: &ScorerModel<f64>, batch: &EncodedBatch, lambda: f64, i: usize, eps: f64) -> Result<f64> {
    let mut m = model.clone();
    let x = m.params.get_flat(i);
    m.params.set_flat(i, x + eps);
    let plus = m.loss(batch, lambda)?.combined;
    m.params.set_flat(i, x - eps);
    let minus = m.loss(batch, lambda)?.combined;
    Ok((plus - minus) / (2.0 * eps))
}

/// Compares analytic gradients with central differences on a random sample
/// of at least `coords` coordinates drawn from every tensor in proportion to
/// its size (at least four per tensor). Dropout is off.
pub fn gradient_check(
    model: &ScorerModel<f64>,
    batch: &EncodedBatch,
    lambda: f64,
    eps: f64,
    coords: usize,
    seed: u64,
) -> Result<GradCheckReport> {
    let (_, grads) = model.loss_and_grad(batch, lambda, None)?;
    let analytic: Vec<f64> = grads.tensors().concat();
    let sizes: Vec<usize> = model.params.tensors().iter().map(|t| t.len()).collect();
    let total: usize = sizes.iter().sum();
    let mut rng = substream(seed, "gradcheck");
    let mut indices = Vec::new();
    let mut offset = 0;
    for &len in &sizes {
        let k = (coords * len).div_ceil(total).max(4).min(len);
        indices.extend(sample(&mut rng, len, k).into_iter().map(|j| offset + j));
        offset += len;
    }
    let mut report = GradCheckReport { max_rel_error: 0.0, checked: indices.len(), worst_index: 0 };
    for i in indices {
        let a = analytic[i];
        let n = numeric_gradient(model, batch, lambda, i, eps)?;
        let rel = (a - n).abs() / (a.abs() + n.abs()).max(1e-8);
        if rel > report.max_rel_error {
            report.max_rel_error = rel;
            report.worst_index = i;
        }
    }
    Ok(report)
}
