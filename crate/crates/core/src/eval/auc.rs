use crate::error::{Error, Result};
use crate::eval::correlation::average_ranks;
use crate::num::Scalar;

/// Probability that a random positive outranks a random negative, ties
/// counted one half.
pub fn auc<T: Scalar>(pos: &[T], neg: &[T]) -> Result<f64> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::InvalidArgument("AUC needs at least one positive and one negative score".into()));
    }
    if pos.iter().chain(neg).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("AUC scores must be finite".into()));
    }
    let all: Vec<f64> = pos.iter().chain(neg).map(|v| v.to_f64_lossy()).collect();
    let ranks = average_ranks(&all);
    let (np, nn) = (pos.len() as f64, neg.len() as f64);
    let rank_sum: f64 = ranks[..pos.len()].iter().sum();
    Ok((rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}
