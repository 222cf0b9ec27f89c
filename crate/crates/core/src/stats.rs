use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Summary statistics of an error series. `std` is the population deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub rmse: f64,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// Summarizes a nonempty sequence of finite values.
pub fn summarize(values: &[f64]) -> Result<Stats> {
    if values.is_empty() {
        return Err(Error::EmptySamples);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "error sample" });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sum_sq: f64 = values.iter().map(|v| v * v).sum();
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;

    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };

    Ok(Stats {
        rmse: libm::sqrt(sum_sq / n),
        mean,
        median,
        std: libm::sqrt(var),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        count: values.len(),
    })
}
