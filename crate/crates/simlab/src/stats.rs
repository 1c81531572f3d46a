//! Summary statistics, histograms and divergences of error distributions.

use emogen_core::metrics::cd_weights;
use emogen_core::rig::WeightVector;
use emogen_core::{Error, Result};

use crate::simulate::DistributionStats;

pub const KL_BINS: usize = 40;
pub const KL_SMOOTHING: f64 = 1e-6;

/// Mean and sample standard deviation; the deviation of a single value is 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Smoothed probabilities of `values` over `bins` equal-width bins on
/// `[0, 1]`; values outside are clamped into the end bins.
pub fn histogram(values: &[f64], bins: usize, smoothing: f64) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::invalid("cannot histogram an empty distribution"));
    }
    let mut counts = vec![0.0; bins];
    for &v in values {
        let b = ((v * bins as f64).floor().max(0.0) as usize).min(bins - 1);
        counts[b] += 1.0;
    }
    let total = values.len() as f64 + smoothing * bins as f64;
    Ok(counts.into_iter().map(|c| (c + smoothing) / total).collect())
}

/// `sum p ln(p / q)` over two discrete distributions.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            actual: q.len(),
        });
    }
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Ok(f64::INFINITY);
            }
            total += pi * (pi / qi).ln();
        }
    }
    Ok(total.max(0.0))
}

/// Divergence of each generation's error distribution from the previous
/// one: entry `g` is `KL(p_{g+1} || p_g)`.
pub fn kl_series(stats: &DistributionStats) -> Result<Vec<f64>> {
    if stats.generations.len() < 2 {
        return Err(Error::invalid("KL tracking needs at least two generations"));
    }
    let hists = stats
        .generations
        .iter()
        .map(|g| histogram(&g.errors, KL_BINS, KL_SMOOTHING))
        .collect::<Result<Vec<_>>>()?;
    hists
        .windows(2)
        .map(|w| kl_divergence(&w[1], &w[0]))
        .collect()
}

/// Percentages of pairwise cosine distances between final elites falling in
/// `[0, .25)`, `[.25, .5)`, `[.5, .75)` and `[.75, 1]`. Pairs involving a
/// neutral elite count as fully dissimilar.
pub fn repeatability_bins(elites: &[&WeightVector]) -> Result<[f64; 4]> {
    if elites.len() < 2 {
        return Err(Error::invalid("repeatability needs at least two elites"));
    }
    let mut counts = [0usize; 4];
    let mut pairs = 0usize;
    for i in 0..elites.len() {
        for j in i + 1..elites.len() {
            let d = cd_weights(elites[i], elites[j]).unwrap_or(1.0);
            counts[((d * 4.0).floor() as usize).min(3)] += 1;
            pairs += 1;
        }
    }
    Ok(counts.map(|c| 100.0 * c as f64 / pairs as f64))
}
