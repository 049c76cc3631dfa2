//! Deterministic reductions.
//!
//! Parallel sums split the index range into fixed-size chunks, sum each chunk
//! pairwise and then sum the chunk totals pairwise. The chunking depends only
//! on the length, so results are bit-identical for any worker count.

use rayon::prelude::*;

const CHUNK: usize = 4096;

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sum `f(i)` for `i in 0..count` in parallel, deterministically.
pub fn par_sum<F>(count: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks: Vec<f64> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(count);
            let vals: Vec<f64> = (lo..hi).map(&f).collect();
            pairwise_sum(&vals)
        })
        .collect();
    pairwise_sum(&chunks)
}

/// [`par_sum`] for `K` accumulators at once.
pub fn par_sum_array<const K: usize, F>(count: usize, f: F) -> [f64; K]
where
    F: Fn(usize) -> [f64; K] + Sync,
{
    let chunks: Vec<[f64; K]> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(count);
            let vals: Vec<[f64; K]> = (lo..hi).map(&f).collect();
            let mut out = [0.0; K];
            for (k, o) in out.iter_mut().enumerate() {
                let col: Vec<f64> = vals.iter().map(|v| v[k]).collect();
                *o = pairwise_sum(&col);
            }
            out
        })
        .collect();
    let mut out = [0.0; K];
    for (k, o) in out.iter_mut().enumerate() {
        let col: Vec<f64> = chunks.iter().map(|v| v[k]).collect();
        *o = pairwise_sum(&col);
    }
    out
}

/// Evaluate `f(i)` for `i in 0..count` in parallel, preserving order.
pub fn par_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

impl MeanEstimate {
    pub fn from_values(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return MeanEstimate { mean: f64::NAN, std_error: f64::NAN, count };
        }
        let mean = pairwise_sum(values) / count as f64;
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if count > 1 { pairwise_sum(&sq) / (count - 1) as f64 } else { 0.0 };
        MeanEstimate { mean, std_error: (var / count as f64).sqrt(), count }
    }
}

/// Estimate for a jittered-stratified sample: one draw per equal-width stratum.
///
/// The variance estimator pairs adjacent strata; it is conservative for
/// integrands that are smooth across neighbouring strata.
pub fn stratified_estimate(values: &[f64]) -> MeanEstimate {
    let count = values.len();
    if count < 2 {
        return MeanEstimate::from_values(values);
    }
    let mean = pairwise_sum(values) / count as f64;
    let diffs: Vec<f64> = values
        .chunks_exact(2)
        .map(|p| (p[0] - p[1]) * (p[0] - p[1]) / 2.0)
        .collect();
    let pairs = diffs.len() as f64;
    // each pair estimates the within-stratum variance of a single draw
    let var_single = pairwise_sum(&diffs) / pairs;
    MeanEstimate { mean, std_error: (var_single / count as f64).sqrt(), count }
}
