//! Runs ensembles of independent trials on the current rayon pool.
//!
//! Trials are cut into fixed shards of [`SHARD_SIZE`] consecutive indices.
//! Each shard accumulates its own [`EnsembleStats`] and the shards are
//! merged; since every outcome depends only on its trial index and merging
//! is exact, the result is identical for any number of threads.

use rayon::prelude::*;

use crate::error::Result;
use crate::stats::{EnsembleStats, TimeHistogram, DEFAULT_BINS};
use crate::walk::{run_walk, run_walk_observed, Mode, SimplexPoint, StepObserver, WalkConfig, WalkOutcome};

pub const SHARD_SIZE: u64 = 1024;

/// Scale of the passage time from `start`, in pseudo-time.
///
/// Exact mean for two states: `x0(1 − x0)/(2D)` for the continuum walk and
/// `k(K − k)` turns for the game. Larger simplices get the same expression
/// in `1 − Σx_i²` scaled by `n − 1`, which is only a sizing heuristic.
pub fn passage_time_scale(start: &SimplexPoint, config: &WalkConfig, mode: Mode) -> f64 {
    let spread = 1.0 - start.coords().iter().map(|x| x * x).sum::<f64>();
    let faces = (start.dimension() - 1) as f64;
    match mode {
        Mode::Continuum => spread * faces / (4.0 * config.diffusion),
        Mode::Discrete => {
            let k = config.chips as f64;
            spread * faces * k * k / 2.0
        }
    }
}

/// [`DEFAULT_BINS`] bins over ten times the passage-time scale.
pub fn default_histogram(start: &SimplexPoint, config: &WalkConfig, mode: Mode) -> Result<TimeHistogram> {
    let unit = config.time_unit(mode);
    let upper = 10.0 * passage_time_scale(start, config, mode);
    let upper = if upper > 0.0 {
        upper
    } else {
        DEFAULT_BINS as f64 * unit
    };
    TimeHistogram::new(DEFAULT_BINS, upper)
}

pub fn run_ensemble(
    start: &SimplexPoint,
    config: &WalkConfig,
    mode: Mode,
    trials: u64,
) -> Result<EnsembleStats> {
    let histogram = default_histogram(start, config, mode)?;
    run_ensemble_with(start, config, mode, trials, histogram)
}

pub fn run_ensemble_with(
    start: &SimplexPoint,
    config: &WalkConfig,
    mode: Mode,
    trials: u64,
    histogram: TimeHistogram,
) -> Result<EnsembleStats> {
    config.check_start(start)?;
    let empty = EnsembleStats::new(config.dimension, config.time_unit(mode), histogram)?;
    let shards = trials.div_ceil(SHARD_SIZE);
    let parts = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut stats = empty.empty_like();
            let first = shard * SHARD_SIZE;
            for trial in first..(first + SHARD_SIZE).min(trials) {
                let outcome = WalkOutcome::from_result(run_walk(mode, start, config, trial))?;
                stats.accumulate(&outcome)?;
            }
            Ok(stats)
        })
        .collect::<Result<Vec<_>>>()?;
    parts.iter().try_fold(empty, |acc, part| acc.merged(part))
}

/// [`run_ensemble`] on a dedicated pool of `threads` workers.
pub fn run_ensemble_on(
    threads: usize,
    start: &SimplexPoint,
    config: &WalkConfig,
    mode: Mode,
    trials: u64,
    histogram: TimeHistogram,
) -> Result<EnsembleStats> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| run_ensemble_with(start, config, mode, trials, histogram))
}

/// Runs trials one after another in index order, handing every step to
/// `observer` along with its trial index. Meant for trajectory dumps.
pub fn run_traced<F>(
    start: &SimplexPoint,
    config: &WalkConfig,
    mode: Mode,
    trials: u64,
    histogram: TimeHistogram,
    mut observer: F,
) -> Result<EnsembleStats>
where
    F: FnMut(u64, u64, &[f64]),
{
    config.check_start(start)?;
    let mut stats = EnsembleStats::new(config.dimension, config.time_unit(mode), histogram)?;
    for trial in 0..trials {
        let mut step_observer = TrialObserver {
            trial,
            inner: &mut observer,
        };
        let outcome = WalkOutcome::from_result(run_walk_observed(
            mode,
            start,
            config,
            trial,
            &mut step_observer,
        ))?;
        stats.accumulate(&outcome)?;
    }
    Ok(stats)
}

struct TrialObserver<'a, F> {
    trial: u64,
    inner: &'a mut F,
}

impl<F: FnMut(u64, u64, &[f64])> StepObserver for TrialObserver<'_, F> {
    fn observe(&mut self, step: u64, coords: &[f64]) {
        (self.inner)(self.trial, step, coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_count_does_not_change_results() {
        let start = SimplexPoint::new(vec![0.5, 0.3, 0.2]).unwrap();
        let config = WalkConfig::continuum(3, 1.0, 1e-3).unwrap().with_seed(99);
        let hist = || default_histogram(&start, &config, Mode::Continuum).unwrap();
        let one = run_ensemble_on(1, &start, &config, Mode::Continuum, 3000, hist()).unwrap();
        let four = run_ensemble_on(4, &start, &config, Mode::Continuum, 3000, hist()).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.trials(), 3000);
        let traced = run_traced(&start, &config, Mode::Continuum, 3000, hist(), |_, _, _| {}).unwrap();
        assert_eq!(traced, one);
    }

    #[test]
    fn incomplete_trials_are_counted() {
        let start = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        let config = WalkConfig::continuum(2, 1.0, 1e-4)
            .unwrap()
            .with_max_steps(50);
        let stats = run_ensemble(&start, &config, Mode::Continuum, 100).unwrap();
        assert_eq!(stats.trials(), 100);
        assert!(stats.incomplete_count() > 90);
        assert_eq!(
            stats.vertex_counts().iter().sum::<u64>() + stats.incomplete_count(),
            100
        );
    }

    #[test]
    fn two_state_scale_is_the_mean_passage_time() {
        let start = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        let config = WalkConfig::default();
        let scale = passage_time_scale(&start, &config, Mode::Continuum);
        assert!((scale - 0.105).abs() < 1e-15);
        let config = WalkConfig::discrete(2, 10).unwrap();
        assert!((passage_time_scale(&start, &config, Mode::Discrete) - 21.0).abs() < 1e-12);
    }

    #[test]
    fn vertex_start_histogram() {
        let start = SimplexPoint::new(vec![0.0, 1.0]).unwrap();
        let config = WalkConfig::default();
        let stats = run_ensemble(&start, &config, Mode::Continuum, 10).unwrap();
        assert_eq!(stats.vertex_counts(), &[0, 10]);
        assert_eq!(stats.time_sum(), 0.0);
    }
}
