use ndarray::ArrayView2;

use super::layers::log_sum_exp;
use crate::num::{from_usize, Scalar};

/// Batch-mean losses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParts<T> {
    pub combined: T,
    pub classification: T,
    pub reconstruction: T,
}

fn softplus<T: Scalar>(x: T) -> T {
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

/// Binary cross-entropy of `sigmoid(z)` against `y`.
pub fn classification_loss_from_logit<T: Scalar>(z: T, y: u8) -> T {
    if y == 1 {
        softplus(-z)
    } else {
        softplus(z)
    }
}

/// Binary cross-entropy of a probability `y_hat` against `y`.
pub fn classification_loss<T: Scalar>(y_hat: T, y: u8) -> T {
    if y == 1 {
        -y_hat.ln()
    } else {
        -(-y_hat).ln_1p()
    }
}

/// Mean negative log-likelihood of `targets` over rows where `mask` is on;
/// zero when no row is.
pub fn reconstruction_loss<T: Scalar>(logits: ArrayView2<'_, T>, targets: &[usize], mask: &[bool]) -> T {
    let mut total = T::zero();
    let mut count = 0;
    for ((row, &t), &m) in logits.rows().into_iter().zip(targets).zip(mask) {
        if m {
            total += log_sum_exp(row) - row[t];
            count += 1;
        }
    }
    if count == 0 {
        T::zero()
    } else {
        total / from_usize(count)
    }
}

/// Batch mean of `classification[i] + lambda * reconstruction[i]`.
pub fn combined_loss<T: Scalar>(classification: &[T], reconstruction: &[T], lambda: f64) -> T {
    assert_eq!(classification.len(), reconstruction.len());
    let lam = T::of(lambda);
    let sum: T = classification.iter().zip(reconstruction).map(|(&c, &r)| c + lam * r).sum();
    sum / from_usize(classification.len().max(1))
}
