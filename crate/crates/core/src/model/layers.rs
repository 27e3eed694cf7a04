//! Row-wise building blocks with their backward passes.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut2, Axis, Zip};
use rand::Rng;

use crate::num::Scalar;

pub(crate) const LN_EPS: f64 = 1e-5;

/// `x.dot(w) + b`.
pub(crate) fn linear<T: Scalar>(x: &Array2<T>, w: &Array2<T>, b: &Array1<T>) -> Array2<T> {
    let mut y = x.dot(w);
    y += b;
    y
}

/// Accumulates parameter gradients of [`linear`] and returns `dx`.
pub(crate) fn linear_backward<T: Scalar>(
    x: &Array2<T>,
    w: &Array2<T>,
    dy: &Array2<T>,
    dw: &mut Array2<T>,
    db: &mut Array1<T>,
) -> Array2<T> {
    ndarray::linalg::general_mat_mul(T::one(), &x.t(), dy, T::one(), dw);
    *db += &dy.sum_axis(Axis(0));
    dy.dot(&w.t())
}

pub(crate) struct LnCache<T> {
    pub xhat: Array2<T>,
    pub rstd: Array1<T>,
}

pub(crate) fn layer_norm<T: Scalar>(x: &Array2<T>, g: &Array1<T>, b: &Array1<T>) -> (Array2<T>, LnCache<T>) {
    let d = T::of(x.ncols() as f64);
    let eps = T::of(LN_EPS);
    let mut xhat = x.clone();
    let mut rstd = Array1::zeros(x.nrows());
    for (mut row, r) in xhat.rows_mut().into_iter().zip(rstd.iter_mut()) {
        let mean = row.sum() / d;
        row -= mean;
        let var = row.iter().map(|&v| v * v).sum::<T>() / d;
        *r = T::one() / (var + eps).sqrt();
        row *= *r;
    }
    let y = &xhat * g + b;
    (y, LnCache { xhat, rstd })
}

pub(crate) fn layer_norm_backward<T: Scalar>(
    cache: &LnCache<T>,
    g: &Array1<T>,
    dy: &Array2<T>,
    dg: &mut Array1<T>,
    db: &mut Array1<T>,
) -> Array2<T> {
    *dg += &(dy * &cache.xhat).sum_axis(Axis(0));
    *db += &dy.sum_axis(Axis(0));
    let d = T::of(dy.ncols() as f64);
    let mut dx = dy * g;
    for ((mut row, xh), &r) in dx.rows_mut().into_iter().zip(cache.xhat.rows()).zip(&cache.rstd) {
        let mean_d = row.sum() / d;
        let mean_dx = row.iter().zip(xh).map(|(&a, &b)| a * b).sum::<T>() / d;
        Zip::from(&mut row).and(&xh).for_each(|v, &h| *v = r * (*v - mean_d - h * mean_dx));
    }
    dx
}

const GELU_C: f64 = 0.797_884_560_802_865_4;
const GELU_A: f64 = 0.044_715;

/// Tanh approximation of GELU.
pub(crate) fn gelu<T: Scalar>(x: T) -> T {
    let half = T::of(0.5);
    let inner = T::of(GELU_C) * (x + T::of(GELU_A) * x * x * x);
    half * x * (T::one() + inner.tanh())
}

pub(crate) fn gelu_grad<T: Scalar>(x: T) -> T {
    let half = T::of(0.5);
    let c = T::of(GELU_C);
    let a = T::of(GELU_A);
    let t = (c * (x + a * x * x * x)).tanh();
    half * (T::one() + t) + half * x * (T::one() - t * t) * c * (T::one() + T::of(3.0) * a * x * x)
}

/// In-place row softmax with max subtraction.
pub(crate) fn softmax_rows<T: Scalar>(mut m: ArrayViewMut2<'_, T>) {
    for mut row in m.rows_mut() {
        let max = row.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row /= sum;
    }
}

/// `log(sum(exp(row)))` computed stably.
pub(crate) fn log_sum_exp<T: Scalar>(row: ArrayView1<'_, T>) -> T {
    let max = row.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    max + row.iter().map(|&v| (v - max).exp()).sum::<T>().ln()
}

/// Inverted dropout mask: 0 or `1/(1-p)` per element.
pub(crate) fn dropout_mask<T: Scalar, R: Rng + ?Sized>(shape: (usize, usize), p: f64, rng: &mut R) -> Array2<T> {
    let keep = T::of(1.0 / (1.0 - p));
    Array2::from_shape_simple_fn(shape, || if rng.random::<f64>() < p { T::zero() } else { keep })
}

/// Softmax backward for a row-stochastic matrix `p`: `p * (dp - rowsum(dp * p))`.
pub(crate) fn softmax_backward<T: Scalar>(p: ArrayView2<'_, T>, dp: &Array2<T>) -> Array2<T> {
    let mut ds = dp.clone();
    for (mut row, pr) in ds.rows_mut().into_iter().zip(p.rows()) {
        let dot = row.iter().zip(pr).map(|(&a, &b)| a * b).sum::<T>();
        Zip::from(&mut row).and(&pr).for_each(|v, &q| *v = q * (*v - dot));
    }
    ds
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn layer_norm_rows_are_standardized() {
        let x: Array2<f64> = array![[1.0, 2.0, 3.0, 4.0], [-1.0, 0.0, 5.0, 8.0]];
        let g = Array1::ones(4);
        let b = Array1::zeros(4);
        let (y, _) = layer_norm(&x, &g, &b);
        for row in y.rows() {
            assert!(row.sum().abs() < 1e-12);
            let var = row.iter().map(|v| v * v).sum::<f64>() / 4.0;
            assert!((var - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn gelu_matches_reference_values() {
        assert_eq!(gelu(0.0f64), 0.0);
        assert!((gelu(1.0f64) - 0.841_191_990_607_754_3).abs() < 1e-12);
        assert!((gelu(-2.0f64) + 0.045_402_305_912_117_8).abs() < 1e-12);
        for x in [-3.0, -0.7, 0.0, 0.4, 2.5f64] {
            let fd = (gelu(x + 1e-6) - gelu(x - 1e-6)) / 2e-6;
            assert!((fd - gelu_grad(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn softmax_is_normalized_and_stable() {
        let mut m: Array2<f64> = array![[1000.0, 1001.0, 999.0], [0.0, 0.0, 0.0]];
        softmax_rows(m.view_mut());
        for row in m.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
        assert!((m[[1, 0]] - 1.0 / 3.0).abs() < 1e-12);
        let lse = log_sum_exp(array![1000.0, 1000.0].view());
        assert!((lse - 1000.0 - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn dropout_keeps_expected_fraction() {
        let m: Array2<f64> = dropout_mask((200, 50), 0.1, &mut crate::rng::substream(0, "d"));
        let kept = m.iter().filter(|&&v| v > 0.0).count() as f64 / 10_000.0;
        assert!((kept - 0.9).abs() < 0.02);
        assert!((m.mean().unwrap() - 1.0).abs() < 0.03);
    }
}
