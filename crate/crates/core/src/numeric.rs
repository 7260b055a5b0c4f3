//! Normal-distribution helpers and the balanced tree reduction used for the
//! probability-of-maximum product.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Cells below this log-CDF contribute an exactly zero product.
pub const LOG_UNDERFLOW: f64 = -745.0;

#[inline]
pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

#[inline]
pub fn log_norm_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

#[inline]
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// `ln Φ(z)`, accurate across the whole real line.
///
/// Far in the left tail the asymptotic expansion
/// `ln Φ(z) = -z²/2 - ln(-z) - ln√(2π) + ln(1 - 1/z² + 3/z⁴ - …)` replaces
/// the direct form, so the result stays finite where `Φ(z)` underflows.
#[inline]
pub fn log_norm_cdf(z: f64) -> f64 {
    if z > 8.0 {
        // ln(1 − Q) = −Q to within Q² < 1e-30, with the upper tail Q from
        // the same series; avoids erfc where it dominates the cost.
        let r = 1.0 / (z * z);
        let series = 1.0 - r * (1.0 - r * (3.0 - r * (15.0 - r * 105.0)));
        -(log_norm_pdf(z).exp() / z) * series
    } else if z > 5.0 {
        (-0.5 * libm::erfc(z * FRAC_1_SQRT_2)).ln_1p()
    } else if z > -30.0 {
        (0.5 * libm::erfc(-z * FRAC_1_SQRT_2)).ln()
    } else {
        let r = 1.0 / (z * z);
        let series = 1.0 - r * (1.0 - r * (3.0 - r * (15.0 - r * 105.0)));
        -0.5 * z * z - (-z).ln() - LN_SQRT_2PI + series.ln()
    }
}

/// Sums `values` along a balanced binary tree.
///
/// The tree shape depends only on `values.len()`, so the result is
/// bit-reproducible regardless of how the two halves are scheduled.
pub fn tree_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let (a, b) = values.split_at(n / 2);
            tree_sum(a) + tree_sum(b)
        }
    }
}

/// Parallel counterpart of [`tree_sum`] with the identical tree shape.
pub fn par_tree_sum(values: &[f64]) -> f64 {
    const SEQ: usize = 4096;
    if values.len() <= SEQ {
        return tree_sum(values);
    }
    let (a, b) = values.split_at(values.len() / 2);
    let (x, y) = rayon::join(|| par_tree_sum(a), || par_tree_sum(b));
    x + y
}

/// Golden-section search for the maximizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_max(mut lo: f64, mut hi: f64, iters: usize, f: impl Fn(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn log_cdf_matches_direct_where_representable() {
        for i in -370..=120 {
            let z = i as f64 / 10.0;
            let direct = norm_cdf(z).ln();
            let got = log_norm_cdf(z);
            assert!(
                (got - direct).abs() <= 1e-12 * direct.abs().max(1e-300) + 1e-15,
                "z={z} got={got} direct={direct}"
            );
        }
    }

    #[test]
    fn log_cdf_is_continuous_across_branch_points() {
        // The upper-tail series is truncated at relative error ~1e-6.
        for &(z, rel) in &[(-30.0f64, 1e-7), (5.0, 1e-7), (8.0, 1e-5)] {
            let a = log_norm_cdf(z - 1e-9);
            let b = log_norm_cdf(z + 1e-9);
            assert!((a - b).abs() < rel * a.abs(), "{z}: {a} vs {b}");
        }
        // Mills-ratio sanity deep in the tail: Φ(z) ≈ φ(z)/|z|.
        let z = -200.0f64;
        let approx = log_norm_pdf(z) - (-z).ln();
        assert!((log_norm_cdf(z) - approx).abs() < 1e-4);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let x = golden_max(-3.0, 5.0, 100, |x| -(x - 1.25) * (x - 1.25));
        assert!((x - 1.25).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn tree_sum_agrees_with_sequential_for_any_order(
            mut v in proptest::collection::vec(-50.0f64..0.0, 1..600),
            seed in any::<u64>(),
        ) {
            let seq: f64 = v.iter().sum();
            let t = tree_sum(&v);
            prop_assert!((t - seq).abs() <= 1e-10 * seq.abs().max(1.0));
            // Reordering the operands changes only rounding.
            let n = v.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                v.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert!((tree_sum(&v) - seq).abs() <= 1e-10 * seq.abs().max(1.0));
            prop_assert_eq!(par_tree_sum(&v), tree_sum(&v));
        }
    }
}
