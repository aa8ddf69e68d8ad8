//! One-sample Kolmogorov–Smirnov distance.

use crate::error::{Error, Result};

/// `sup_x |F_N(x) − F(x)|` for the empirical distribution of `samples`,
/// via the sorted-sample formula
/// `max_i max(i/N − F(x_(i)), F(x_(i)) − (i−1)/N)`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    }))
}
