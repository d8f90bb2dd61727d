use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::EnsembleStats;
use crate::error::{Error, Result};

/// Per-vertex |z| bound for a Born comparison to pass.
pub const Z_LIMIT: f64 = 3.0;

/// Upper quantile of the chi-square distribution used as the pass threshold.
pub const CHI_SQUARE_QUANTILE: f64 = 0.999;

/// Observed vertex frequencies against the Born weights `|a_i|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct BornComparison {
    pub expected: Vec<f64>,
    pub observed: Vec<f64>,
    pub z_scores: Vec<f64>,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub chi_square_threshold: f64,
    pub completed: u64,
    pub pass: bool,
}

/// Compares vertex frequencies of completed trials with `expected`.
///
/// `z_i = (observed_i − expected_i) / √(expected_i(1 − expected_i)/N)` and
/// Pearson's chi-square over the vertices with non-zero expectation. Passes
/// when every `|z_i| < 3` and chi-square is below its 99.9% quantile.
/// Vertices expected with certainty or never have zero variance: any
/// deviation there gives an infinite score.
pub fn compare_born(stats: &EnsembleStats, expected: &[f64]) -> Result<BornComparison> {
    if expected.len() != stats.dimension() {
        return Err(Error::DimensionMismatch {
            expected: stats.dimension(),
            got: expected.len(),
        });
    }
    let observed = stats.frequencies().ok_or(Error::NoCompletedTrials)?;
    let completed = stats.completed();
    let n = completed as f64;

    let z_scores: Vec<f64> = expected
        .iter()
        .zip(&observed)
        .map(|(&e, &o)| {
            let var = e * (1.0 - e) / n;
            if var > 0.0 {
                (o - e) / var.sqrt()
            } else if o == e {
                0.0
            } else {
                (o - e).signum() * f64::INFINITY
            }
        })
        .collect();

    let mut chi_square = 0.0;
    let mut cells = 0;
    for (&e, &count) in expected.iter().zip(stats.vertex_counts()) {
        let mean = e * n;
        if mean > 0.0 {
            cells += 1;
            chi_square += (count as f64 - mean).powi(2) / mean;
        } else if count > 0 {
            chi_square = f64::INFINITY;
        }
    }
    let degrees_of_freedom = cells.max(1) - 1;
    let chi_square_threshold = chi_square_quantile(degrees_of_freedom);
    let pass = z_scores.iter().all(|z| z.abs() < Z_LIMIT) && chi_square < chi_square_threshold
        || (degrees_of_freedom == 0 && chi_square == 0.0);

    Ok(BornComparison {
        expected: expected.to_vec(),
        observed,
        z_scores,
        chi_square,
        degrees_of_freedom,
        chi_square_threshold,
        completed,
        pass,
    })
}

/// 99.9% quantile of chi-square with `dof` degrees of freedom (0 for `dof = 0`).
pub fn chi_square_quantile(dof: usize) -> f64 {
    if dof == 0 {
        return 0.0;
    }
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(CHI_SQUARE_QUANTILE)
}

/// Simulated mean passage time against an analytic value.
#[derive(Debug, Clone, PartialEq)]
pub struct MfptComparison {
    pub analytic: f64,
    pub observed: f64,
    pub stderr: f64,
    /// `3·stderr + 2·time_unit`: sampling error plus the bias from
    /// resolving passage only to whole steps.
    pub allowance: f64,
    pub pass: bool,
}

pub fn compare_mfpt(stats: &EnsembleStats, analytic: f64) -> Result<MfptComparison> {
    let (observed, stderr) = stats
        .time_mean_and_stderr()
        .ok_or(Error::NoCompletedTrials)?;
    let allowance = 3.0 * stderr + 2.0 * stats.time_unit();
    Ok(MfptComparison {
        analytic,
        observed,
        stderr,
        allowance,
        pass: (observed - analytic).abs() <= allowance,
    })
}

/// Kolmogorov–Smirnov distance between the binned passage times in `stats`
/// and a reference CDF evaluated at the histogram edges.
///
/// Times past the last edge sit in the overflow bin, so the empirical CDF
/// at the top edge is below one by the overflow fraction.
pub fn ks_statistic(stats: &EnsembleStats, cdf_at_edges: &[f64]) -> Result<f64> {
    let hist = stats.histogram();
    if cdf_at_edges.len() != hist.bins() + 1 {
        return Err(Error::DimensionMismatch {
            expected: hist.bins() + 1,
            got: cdf_at_edges.len(),
        });
    }
    let total = hist.total();
    if total == 0 {
        return Err(Error::NoCompletedTrials);
    }
    let total = total as f64;
    let mut cumulative = 0_u64;
    let mut worst = cdf_at_edges[0].abs();
    for (count, &reference) in hist.counts().iter().zip(&cdf_at_edges[1..]) {
        cumulative += count;
        worst = worst.max((cumulative as f64 / total - reference).abs());
    }
    Ok(worst)
}
