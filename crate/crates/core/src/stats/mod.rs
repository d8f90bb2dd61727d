//! Mergeable ensemble statistics and the Monte Carlo versus analytic checks.

mod compare;
mod ensemble;

pub use compare::{
    chi_square_quantile, compare_born, compare_mfpt, ks_statistic, BornComparison,
    MfptComparison, CHI_SQUARE_QUANTILE, Z_LIMIT,
};
pub use ensemble::{EnsembleStats, TimeHistogram, DEFAULT_BINS};
