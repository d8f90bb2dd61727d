use rand::Rng;
use rand_distr::StandardNormal;

use super::{trial_rng, SimplexPoint, StepObserver, Survivors, WalkConfig, WalkOutcome};
use crate::error::{Error, Result};

// exp(-40) ≈ 4e-18: bridge crossings less likely than this are not sampled.
const BRIDGE_CUTOFF: f64 = 40.0;

/// Brownian walk on the simplex with sticky faces.
///
/// Each step adds Gaussian noise to the active coordinates, centred so the
/// increments sum to zero and rescaled by `√(m/(m−1))` so every coordinate
/// moves with standard deviation `σ = √(2·D·dt)` (the interior then obeys
/// `∂c/∂t = D ∂²c/∂x²`). A coordinate is eliminated when it ends a step at
/// or below zero, or when it stayed positive but the Brownian bridge
/// between the two positions crossed zero, which happens with probability
/// `exp(−2·x_before·x_after/σ²)`. Eliminated coordinates are set to zero
/// and the survivors rescaled to sum to one. The bridge test removes the
/// `O(σ)` overshoot bias of discrete monitoring, so passage times are
/// accurate to within one step.
pub fn run_continuum_walk(
    start: &SimplexPoint,
    config: &WalkConfig,
    trial_index: u64,
) -> Result<WalkOutcome> {
    run_continuum_walk_observed(start, config, trial_index, &mut super::NoTrace)
}

pub fn run_continuum_walk_observed<O: StepObserver>(
    start: &SimplexPoint,
    config: &WalkConfig,
    trial_index: u64,
    observer: &mut O,
) -> Result<WalkOutcome> {
    config.check_start(start)?;
    if let Some(i) = start.coords().iter().position(|&x| x < 0.0) {
        return Err(Error::InvalidStart(format!("coordinate {i} is negative")));
    }
    let n = config.dimension;
    let mut x = start.coords().to_vec();
    let mut walkers = Survivors::from_mask(start.active_mask());
    if let Some(w) = walkers.winner() {
        x.iter_mut().for_each(|v| *v = 0.0);
        x[w] = 1.0;
        observer.observe(0, &x);
        return Ok(walkers.outcome(n, 0, config.dt));
    }
    observer.observe(0, &x);

    let sigma = config.step_sigma();
    let variance = sigma * sigma;
    let mut rng = trial_rng(config.seed, trial_index);
    let mut before = vec![0.0; n];
    let mut noise = vec![0.0; n];
    let mut hit: Vec<usize> = Vec::with_capacity(n);
    let mut steps = 0_u64;

    while walkers.active.len() > 1 {
        if steps == config.max_steps {
            return Err(walkers.step_limit(n, steps, config.dt));
        }
        steps += 1;

        let m = walkers.active.len();
        let mut mean = 0.0;
        for &i in &walkers.active {
            let z: f64 = rng.sample(StandardNormal);
            noise[i] = z;
            mean += z;
        }
        mean /= m as f64;
        let scale = sigma * (m as f64 / (m - 1) as f64).sqrt();
        for &i in &walkers.active {
            before[i] = x[i];
            x[i] += scale * (noise[i] - mean);
        }

        hit.clear();
        for &i in &walkers.active {
            if x[i] <= 0.0 {
                hit.push(i);
                continue;
            }
            let exponent = 2.0 * before[i] * x[i] / variance;
            if exponent < BRIDGE_CUTOFF && rng.random::<f64>() < (-exponent).exp() {
                hit.push(i);
            }
        }
        if !hit.is_empty() {
            eliminate(&mut x, &mut walkers, &mut hit);
        }
        observer.observe(steps, &x);
    }
    Ok(walkers.outcome(n, steps, config.dt))
}

/// Zeroes the coordinates in `hit` and rescales the survivors so the total
/// stays one. If every active coordinate is flagged, the largest survives.
fn eliminate(x: &mut [f64], walkers: &mut Survivors, hit: &mut Vec<usize>) {
    // deepest crossings leave first; index breaks ties
    hit.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    if hit.len() == walkers.active.len() {
        hit.pop();
    }
    for &i in hit.iter() {
        x[i] = 0.0;
        walkers.eliminated.push(i);
    }
    walkers.active.retain(|i| !hit.contains(i));

    if let [w] = walkers.active.as_slice() {
        x[*w] = 1.0;
        return;
    }
    let total: f64 = walkers.active.iter().map(|&i| x[i]).sum();
    for &i in &walkers.active {
        x[i] /= total;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(v: &[f64]) -> SimplexPoint {
        SimplexPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn vertex_start_returns_immediately() {
        let config = WalkConfig::continuum(2, 1.0, 1e-4).unwrap();
        let out = run_continuum_walk(&point(&[1.0, 0.0]), &config, 0).unwrap();
        assert_eq!(out.winner, Some(0));
        assert_eq!(out.steps, 0);
        assert_eq!(out.elapsed, 0.0);
        assert_eq!(out.elimination_order, vec![1]);
    }

    #[test]
    fn face_start_keeps_zero_coordinates_out() {
        let config = WalkConfig::continuum(3, 1.0, 1e-4).unwrap().with_seed(3);
        let start = point(&[0.4, 0.0, 0.6]);
        for t in 0..200 {
            let mut obs = |_: u64, x: &[f64]| assert_eq!(x[1], 0.0);
            let out = run_continuum_walk_observed(&start, &config, t, &mut obs).unwrap();
            assert_ne!(out.winner, Some(1));
            assert_eq!(out.elimination_order[0], 1);
        }
    }

    #[test]
    fn conservation_and_monotone_elimination() {
        let config = WalkConfig::continuum(5, 1.0, 1e-4).unwrap().with_seed(9);
        let start = point(&[0.1, 0.2, 0.3, 0.25, 0.15]);
        let mut total_steps = 0;
        for t in 0..20 {
            let mut dead = [false; 5];
            let mut obs = |_: u64, x: &[f64]| {
                assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                for i in 0..5 {
                    assert!(x[i] >= 0.0);
                    assert!(!(dead[i] && x[i] != 0.0), "coordinate {i} revived");
                    dead[i] |= x[i] == 0.0;
                }
            };
            let out = run_continuum_walk_observed(&start, &config, t, &mut obs).unwrap();
            total_steps += out.steps;
            let w = out.winner.unwrap();
            assert_eq!(out.elimination_order.len(), 4);
            assert!(!out.elimination_order.contains(&w));
            assert!(dead.iter().enumerate().all(|(i, &d)| d == (i != w)));
        }
        assert!(total_steps > 10_000);
    }

    #[test]
    fn same_trial_same_outcome() {
        let config = WalkConfig::continuum(3, 1.0, 1e-4).unwrap().with_seed(77);
        let start = point(&[0.5, 0.3, 0.2]);
        let a = run_continuum_walk(&start, &config, 123).unwrap();
        let b = run_continuum_walk(&start, &config, 123).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.elapsed.to_bits(), b.elapsed.to_bits());
        let c = run_continuum_walk(&start, &config, 124).unwrap();
        assert_ne!(a.steps, c.steps);
    }

    #[test]
    fn step_cap() {
        let config = WalkConfig::continuum(2, 1.0, 1e-6)
            .unwrap()
            .with_max_steps(10);
        match run_continuum_walk(&point(&[0.5, 0.5]), &config, 0) {
            Err(Error::StepLimitExceeded { outcome }) => {
                assert_eq!(outcome.steps, 10);
                assert_eq!(outcome.winner, None);
                assert!((outcome.elapsed - 1e-5).abs() < 1e-18);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let config = WalkConfig::continuum(3, 1.0, 1e-4).unwrap();
        assert!(matches!(
            run_continuum_walk(&point(&[0.5, 0.5]), &config, 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eliminate_handles_all_flagged() {
        let mut x = vec![0.6, 0.4];
        let mut s = Survivors::from_mask(&[true, true]);
        let mut hit = vec![0, 1];
        eliminate(&mut x, &mut s, &mut hit);
        assert_eq!(s.winner(), Some(0));
        assert_eq!(x, vec![1.0, 0.0]);
    }

    #[test]
    fn eliminate_rescales_survivors() {
        let mut x = vec![-0.02, 0.51, 0.51];
        let mut s = Survivors::from_mask(&[true, true, true]);
        let mut hit = vec![0];
        eliminate(&mut x, &mut s, &mut hit);
        assert_eq!(x, vec![0.0, 0.5, 0.5]);
        assert_eq!(s.eliminated, vec![0]);
    }
}
