//! Deterministic pairwise summation.
//!
//! The reduction tree depends only on the slice length, so a result never
//! changes with the number of worker threads that produced the terms.

const LEAF: usize = 32;

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return xs.iter().fold(0.0, |a, &b| a + b);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
