//! Summary statistics with nearest-rank percentiles.

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("summary statistics need at least one value")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub mean: f64,
    pub median: f64,
    pub p99: f64,
}

/// Mean, median (midpoint of the two central values for even counts), and
/// the nearest-rank 99th percentile.
pub fn summary_stats(values: &[f64]) -> Result<SummaryStats, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("stats input must not contain NaN"));
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let rank = ((0.99 * n as f64).ceil() as usize).clamp(1, n);
    Ok(SummaryStats {
        mean,
        median,
        p99: sorted[rank - 1],
    })
}
