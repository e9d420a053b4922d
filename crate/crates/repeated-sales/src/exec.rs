//! Data-parallel map helpers with a sequential fallback.
//!
//! Everything hot in this crate (grid scans, quadrature panels, Monte-Carlo
//! batches, verifier grids, sweeps) is an independent map over an index
//! range. With the `parallel` feature (on by default) these run on rayon;
//! without it they degrade to plain sequential iteration. Results are always
//! collected in index order, so output is identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n` and collects the results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..n` and collects the results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Pairwise summation in a fixed order.
///
/// Deterministic regardless of how the summands were produced, and far less
/// rounding drift than a running sum for long inputs.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_indexed_preserves_order() {
        let v = map_indexed(100, |i| i * i);
        assert_eq!(v[7], 49);
        assert_eq!(v.len(), 100);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let xs = [0.1, 0.2, 0.3, 0.4];
        assert!((pairwise_sum(&xs) - 1.0).abs() < 1e-15);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
