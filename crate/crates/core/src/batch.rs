//! Batch-means error estimation for ratio estimators.
//!
//! A correlated stream is cut into contiguous batches; the ratio
//! `F = ΣN_b / ΣD_b` gets the standard error
//! `SE² = B/(B−1) · Σ_b (N_b − F·D_b)² / (ΣD_b)²`.

use crate::error::{Error, Result};

/// Batches per chain.
pub const DEFAULT_BATCHES: usize = 64;
/// Fewest nonempty batches for which an error bar is reported.
pub const MIN_BATCHES: usize = 30;

/// Batch containing item `index` of `total` when cut into `batches`
/// contiguous, equally sized chunks.
pub fn batch_of(index: u64, total: u64, batches: usize) -> usize {
    if total == 0 {
        return 0;
    }
    ((index as u128 * batches as u128) / total as u128).min(batches as u128 - 1) as usize
}

/// Ratio estimate and its batch-means standard error. Batches with zero
/// denominator are skipped.
pub fn ratio_with_error(num: &[f64], den: &[f64]) -> Result<(f64, f64)> {
    debug_assert_eq!(num.len(), den.len());
    let used: Vec<(f64, f64)> = num
        .iter()
        .zip(den)
        .filter(|(_, d)| **d != 0.0)
        .map(|(n, d)| (*n, *d))
        .collect();
    if used.len() < MIN_BATCHES {
        return Err(Error::InsufficientData(format!(
            "{} nonempty batches, at least {MIN_BATCHES} required",
            used.len()
        )));
    }
    let sn: f64 = used.iter().map(|(n, _)| n).sum();
    let sd: f64 = used.iter().map(|(_, d)| d).sum();
    let f = sn / sd;
    let b = used.len() as f64;
    let ss: f64 = used.iter().map(|(n, d)| (n - f * d).powi(2)).sum();
    Ok((f, (b / (b - 1.0) * ss).sqrt() / sd.abs()))
}
