//! Discrete 2-variation `sup_{partitions} (Σ_k ‖v(t_k) − v(t_{k−1})‖²)^{1/2}`
//! over all sub-partitions of a finite sample grid.

use num_complex::Complex64;

/// Squared 2-variation for an abstract sequence of `len` points given the
/// squared distance between any two of them.
///
/// `best[j]` is the largest sum over partitions ending at `j`; adding an
/// outer point never lowers a sum, so the answer is `best[len-1]`.
pub fn two_variation_sq_by(len: usize, dist_sq: impl Fn(usize, usize) -> f64) -> f64 {
    if len < 2 {
        return 0.0;
    }
    let mut best = vec![0.0f64; len];
    for j in 1..len {
        let mut b = 0.0f64;
        for (i, &bi) in best.iter().enumerate().take(j) {
            b = b.max(bi + dist_sq(i, j));
        }
        best[j] = b;
    }
    best[len - 1]
}

/// 2-variation of a sequence of snapshots in a normed space.
pub fn discrete_two_variation<T>(snapshots: &[T], dist: impl Fn(&T, &T) -> f64) -> f64 {
    two_variation_sq_by(snapshots.len(), |i, j| dist(&snapshots[i], &snapshots[j]).powi(2)).sqrt()
}

/// Squared 2-variation of a complex scalar sequence (the per-mode kernel of
/// the cube-wise norms).
pub fn scalar_two_variation_sq(values: &[Complex64]) -> f64 {
    let len = values.len();
    if len < 2 {
        return 0.0;
    }
    let mut best = vec![0.0f64; len];
    for j in 1..len {
        let vj = values[j];
        let mut b = 0.0f64;
        for i in 0..j {
            let d = values[i] - vj;
            b = b.max(best[i] + (d.re * d.re + d.im * d.im));
        }
        best[j] = b;
    }
    best[len - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exhaustive_sq(values: &[f64]) -> f64 {
        let n = values.len();
        let mut best = 0.0f64;
        for mask in 0u32..(1 << n) {
            let picked: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let s: f64 = picked
                .windows(2)
                .map(|w| (values[w[1]] - values[w[0]]).powi(2))
                .sum();
            best = best.max(s);
        }
        best
    }

    #[test]
    fn constant_sequence_has_no_variation() {
        assert_eq!(discrete_two_variation(&[3.0; 6], |a: &f64, b: &f64| (a - b).abs()), 0.0);
        assert_eq!(discrete_two_variation(&[1.0], |a: &f64, b: &f64| (a - b).abs()), 0.0);
    }

    #[test]
    fn skipping_middle_point_wins() {
        let v = discrete_two_variation(&[0.0, 1.0, 2.0], |a: &f64, b: &f64| (a - b).abs());
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn complex_kernel_matches_generic() {
        let vals: Vec<Complex64> = (0..9).map(|k| Complex64::from_polar(1.0 + k as f64 * 0.1, k as f64)).collect();
        let a = scalar_two_variation_sq(&vals);
        let b = two_variation_sq_by(vals.len(), |i, j| (vals[i] - vals[j]).norm_sqr());
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn dp_equals_enumeration(values in proptest::collection::vec(-5.0f64..5.0, 1..=10)) {
            let dp = two_variation_sq_by(values.len(), |i, j| (values[i] - values[j]).powi(2));
            prop_assert_eq!(dp, exhaustive_sq(&values));
        }

        #[test]
        fn adding_candidate_points_never_lowers(values in proptest::collection::vec(-5.0f64..5.0, 2..=12), drop in 0usize..12) {
            let full = two_variation_sq_by(values.len(), |i, j| (values[i] - values[j]).powi(2));
            let mut sub = values.clone();
            if sub.len() > 2 {
                sub.remove(drop % sub.len());
            }
            let fewer = two_variation_sq_by(sub.len(), |i, j| (sub[i] - sub[j]).powi(2));
            prop_assert!(fewer <= full);
        }
    }
}
