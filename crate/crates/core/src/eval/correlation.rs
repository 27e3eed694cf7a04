use std::cmp::Ordering;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::num::{from_usize, Scalar};

/// A coefficient with its two-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation<T> {
    pub coef: T,
    pub p_value: T,
}

fn check<T: Scalar>(x: &[T], y: &[T]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!("vectors differ in length: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::UndefinedCorrelation("fewer than three observations"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::UndefinedCorrelation("non-finite observation"));
    }
    Ok(())
}

fn t_test_p(r: f64, n: usize) -> f64 {
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
}

fn pearson_coef<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    let n = from_usize::<T>(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::UndefinedCorrelation("constant input vector"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).max(-T::one()).min(T::one()))
}

/// Sample Pearson correlation with a t-test p-value.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<Correlation<T>> {
    check(x, y)?;
    let r = pearson_coef(x, y)?;
    Ok(Correlation { coef: r, p_value: T::of(t_test_p(r.to_f64_lossy(), x.len())) })
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks<T: Scalar>(x: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![T::zero(); x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && x[order[j]] == x[order[i]] {
            j += 1;
        }
        let avg = T::of((i + j + 1) as f64 / 2.0);
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

/// Spearman's rho: Pearson correlation of average ranks, t-test p-value.
pub fn spearman<T: Scalar>(x: &[T], y: &[T]) -> Result<Correlation<T>> {
    check(x, y)?;
    let rho = pearson_coef(&average_ranks(x), &average_ranks(y))?;
    Ok(Correlation { coef: rho, p_value: T::of(t_test_p(rho.to_f64_lossy(), x.len())) })
}

/// Sizes of runs of equal values in a sorted slice.
fn tie_groups<T: PartialEq>(sorted: impl Iterator<Item = T>) -> Vec<u64> {
    let mut groups = Vec::new();
    let mut prev: Option<T> = None;
    let mut run = 0u64;
    for v in sorted {
        if prev.as_ref() == Some(&v) {
            run += 1;
        } else {
            if run > 1 {
                groups.push(run);
            }
            run = 1;
            prev = Some(v);
        }
    }
    if run > 1 {
        groups.push(run);
    }
    groups
}

/// Merge sort counting strict inversions.
fn count_swaps<T: Scalar>(v: &mut [T], buf: &mut Vec<T>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = count_swaps(&mut v[..mid], buf) + count_swaps(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf.push(v[j]);
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// Kendall's tau-b with tie correction, computed in O(n log n); the p-value
/// uses the normal approximation with the tie-corrected variance.
pub fn kendall<T: Scalar>(x: &[T], y: &[T]) -> Result<Correlation<T>> {
    check(x, y)?;
    let n = x.len();
    let mut pairs: Vec<(T, T)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
    });
    let x_ties = tie_groups(pairs.iter().map(|p| p.0));
    let joint_ties = tie_groups(pairs.iter().copied());
    let mut ys: Vec<T> = pairs.iter().map(|p| p.1).collect();
    let swaps = count_swaps(&mut ys, &mut Vec::with_capacity(n));
    let y_ties = tie_groups(ys.iter().copied());

    let pairs_of = |g: &[u64]| g.iter().map(|&t| t * (t - 1) / 2).sum::<u64>();
    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let (n1, n2, n3) = (pairs_of(&x_ties), pairs_of(&y_ties), pairs_of(&joint_ties));
    if n1 == n0 || n2 == n0 {
        return Err(Error::UndefinedCorrelation("constant input vector"));
    }
    let s = n0 as f64 - n1 as f64 - n2 as f64 + n3 as f64 - 2.0 * swaps as f64;
    let tau = s / ((n0 - n1) as f64).sqrt() / ((n0 - n2) as f64).sqrt();

    let nf = n as f64;
    let sum = |g: &[u64], f: &dyn Fn(f64) -> f64| g.iter().map(|&t| f(t as f64)).sum::<f64>();
    let v0 = nf * (nf - 1.0) * (2.0 * nf + 5.0);
    let vt = sum(&x_ties, &|t| t * (t - 1.0) * (2.0 * t + 5.0));
    let vu = sum(&y_ties, &|t| t * (t - 1.0) * (2.0 * t + 5.0));
    let t2 = sum(&x_ties, &|t| t * (t - 1.0) * (t - 2.0));
    let u2 = sum(&y_ties, &|t| t * (t - 1.0) * (t - 2.0));
    let t1 = sum(&x_ties, &|t| t * (t - 1.0));
    let u1 = sum(&y_ties, &|t| t * (t - 1.0));
    let var = (v0 - vt - vu) / 18.0
        + t2 * u2 / (9.0 * nf * (nf - 1.0) * (nf - 2.0))
        + t1 * u1 / (2.0 * nf * (nf - 1.0));
    let p = if var > 0.0 {
        let z = s / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        (2.0 * (1.0 - normal.cdf(z.abs()))).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(Correlation { coef: T::of(tau.clamp(-1.0, 1.0)), p_value: T::of(p) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_tau_b(x: &[f64], y: &[f64]) -> f64 {
        let (mut c, mut d, mut tx, mut ty) = (0.0f64, 0.0, 0.0, 0.0);
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                let s = (x[i] - x[j]).signum() * (y[i] - y[j]).signum();
                if x[i] == x[j] && y[i] == y[j] {
                    continue;
                } else if x[i] == x[j] {
                    tx += 1.0;
                } else if y[i] == y[j] {
                    ty += 1.0;
                } else if s > 0.0 {
                    c += 1.0;
                } else {
                    d += 1.0;
                }
            }
        }
        (c - d) / ((c + d + tx) * (c + d + ty)).sqrt()
    }

    #[test]
    fn hand_fixtures() {
        let r = pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert!((r.coef - 1.0f64).abs() < 1e-12 && r.p_value < 1e-6);
        assert!((pearson(&[1.0, 2.0, 3.0], &[6.0, 4.0, 2.0]).unwrap().coef + 1.0f64).abs() < 1e-12);
        let x = [1.0, 2.0, 3.0, 4.0, 5.0f64];
        let y = [2.0, 1.0, 4.0, 3.0, 5.0];
        assert!((pearson(&x, &y).unwrap().coef - 0.8).abs() < 1e-12);
        assert!((spearman(&x, &y).unwrap().coef - 0.8).abs() < 1e-12);
        let tau = kendall(&[1.0, 2.0, 3.0f64], &[1.0, 3.0, 2.0]).unwrap();
        assert!((tau.coef - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn p_values_match_reference_implementation() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0f64];
        let y = [2.0, 1.0, 4.0, 3.0, 5.0];
        // Values from scipy.stats.
        assert!((pearson(&x, &y).unwrap().p_value - 0.104_088_038_661_828).abs() < 1e-9);
        assert!((kendall(&x, &y).unwrap().coef - 0.6).abs() < 1e-12);
        assert!((kendall(&x, &y).unwrap().p_value - 0.141_644_690_295_136_8).abs() < 1e-9);
    }

    #[test]
    fn undefined_inputs() {
        assert!(matches!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0f64]), Err(Error::UndefinedCorrelation(_))));
        assert!(matches!(kendall(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0f64]), Err(Error::UndefinedCorrelation(_))));
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0f64]).is_err());
        assert!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0f64]).is_err());
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0f64]), [1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn monotone_maps_give_one() {
        let x = [0.3, 1.2, -4.0, 8.5, 2.2, 0.0f64];
        let y: Vec<f64> = x.iter().map(|v| v.exp() * 3.0 + 1.0).collect();
        assert!((spearman(&x, &y).unwrap().coef - 1.0).abs() < 1e-12);
        assert!((kendall(&x, &y).unwrap().coef - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn kendall_matches_all_pairs_count(v in prop::collection::vec((0i32..6, 0i32..6), 3..40)) {
            let x: Vec<f64> = v.iter().map(|p| p.0 as f64).collect();
            let y: Vec<f64> = v.iter().map(|p| p.1 as f64).collect();
            match kendall(&x, &y) {
                Ok(t) => prop_assert!((t.coef - brute_tau_b(&x, &y)).abs() < 1e-9),
                Err(_) => prop_assert!(x.iter().all(|&a| a == x[0]) || y.iter().all(|&b| b == y[0])),
            }
        }

        #[test]
        fn reversal_negates_tau(v in prop::collection::btree_set(-1000i32..1000, 3..30), seed in 0u64..1000) {
            let x: Vec<f64> = v.iter().map(|&a| a as f64).collect();
            let mut y = x.clone();
            let mut rng = crate::rng::substream(seed, "perm");
            rand::seq::SliceRandom::shuffle(&mut y[..], &mut rng);
            let rev: Vec<f64> = y.iter().map(|a| -a).collect();
            let t = kendall(&x, &y).unwrap().coef;
            prop_assert!((kendall(&x, &rev).unwrap().coef + t).abs() < 1e-12);
        }

        #[test]
        fn invariant_under_increasing_affine_maps(
            v in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 4..30),
            a in 0.1f64..10.0,
            b in -5.0f64..5.0,
        ) {
            let x: Vec<f64> = v.iter().map(|p| p.0).collect();
            let y: Vec<f64> = v.iter().map(|p| p.1).collect();
            let x2: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            if let (Ok(r1), Ok(r2)) = (pearson(&x, &y), pearson(&x2, &y)) {
                prop_assert!((r1.coef - r2.coef).abs() < 1e-9);
                prop_assert!((spearman(&x, &y).unwrap().coef - spearman(&x2, &y).unwrap().coef).abs() < 1e-9);
                prop_assert!((kendall(&x, &y).unwrap().coef - kendall(&x2, &y).unwrap().coef).abs() < 1e-9);
            }
        }
    }
}
