//! First-passage walks on the probability simplex.
//!
//! Two walkers share the same types. The discrete walker plays the chips
//! game: `K` chips split among `n` players, one chip changing hands per
//! turn between a random pair, a player leaving the table when bankrupt.
//! The continuum walker diffuses the coordinates directly with Gaussian
//! steps confined to the zero-sum tangent plane, so `Σx_i = 1` holds at
//! every step. Faces are sticky: a coordinate that reaches zero is frozen
//! there and the walk carries on in the lower-dimensional face. Both stop
//! at a vertex.
//!
//! Every trial draws from its own ChaCha stream keyed by
//! [`derive_trial_seed`], so an outcome is a pure function of
//! `(start, config, trial_index)`.

mod continuum;
mod discrete;
mod seed;

use serde::Serialize;

use crate::error::{Error, Result};

pub use continuum::{run_continuum_walk, run_continuum_walk_observed};
pub use discrete::{chip_counts, run_discrete_game, run_discrete_game_observed};
pub use seed::{derive_trial_seed, trial_rng};

/// Tolerance on `Σx_i = 1` for simplex points.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// Largest per-coordinate step deviation `√(2·D·dt)` a config may request.
pub const MAX_STEP_SIGMA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    coords: Vec<f64>,
    active: Vec<bool>,
}

impl SimplexPoint {
    /// Validates `coords` (n ≥ 2, finite, non-negative, summing to one).
    /// Coordinates that are exactly zero start out eliminated.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionTooSmall(coords.len()));
        }
        if let Some(i) = coords.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidStart(format!(
                "coordinate {i} is {}, expected a finite non-negative value",
                coords[i]
            )));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::InvalidStart(format!(
                "coordinates sum to {sum}, expected 1"
            )));
        }
        Ok(Self::from_weights_unchecked(coords))
    }

    pub(crate) fn from_weights_unchecked(coords: Vec<f64>) -> Self {
        let active = coords.iter().map(|&x| x > 0.0).collect();
        SimplexPoint { coords, active }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn active_mask(&self) -> &[bool] {
        &self.active
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// The vertex index if only one coordinate is active.
    pub fn vertex(&self) -> Option<usize> {
        let mut it = self.active.iter().enumerate().filter(|(_, &a)| a);
        match (it.next(), it.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Discrete,
    Continuum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub dimension: usize,
    /// Diffusion constant `D` of `∂c/∂t = D ∂²c/∂x²`.
    pub diffusion: f64,
    /// Pseudo-time per continuum step.
    pub dt: f64,
    /// Total chips `K` in the discrete game.
    pub chips: u64,
    pub max_steps: u64,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            dimension: 2,
            diffusion: 1.0,
            dt: 1e-4,
            chips: 100,
            max_steps: 10_000_000,
            seed: 0,
        }
    }
}

impl WalkConfig {
    pub fn continuum(dimension: usize, diffusion: f64, dt: f64) -> Result<Self> {
        let config = WalkConfig {
            dimension,
            diffusion,
            dt,
            ..Default::default()
        };
        config.validate()?;
        Ok(config)
    }

    pub fn discrete(dimension: usize, chips: u64) -> Result<Self> {
        let config = WalkConfig {
            dimension,
            chips,
            ..Default::default()
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    /// Per-coordinate standard deviation of one continuum step, `√(2·D·dt)`.
    pub fn step_sigma(&self) -> f64 {
        (2.0 * self.diffusion * self.dt).sqrt()
    }

    /// Fraction of the total moved per turn of the discrete game.
    pub fn stake(&self) -> f64 {
        1.0 / self.chips as f64
    }

    /// Pseudo-time of one step: `dt` for the continuum walk, one turn for the game.
    pub fn time_unit(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Continuum => self.dt,
            Mode::Discrete => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.dimension < 2 {
            return Err(Error::DimensionTooSmall(self.dimension));
        }
        if !(self.diffusion.is_finite() && self.diffusion > 0.0) {
            return bad(format!("diffusion must be positive, got {}", self.diffusion));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        let sigma = self.step_sigma();
        if sigma >= MAX_STEP_SIGMA {
            return bad(format!(
                "step deviation sqrt(2*D*dt) = {sigma} must stay below {MAX_STEP_SIGMA}"
            ));
        }
        if self.chips < 2 {
            return bad(format!("need at least 2 chips, got {}", self.chips));
        }
        if self.max_steps < 1 {
            return bad("max_steps must be at least 1".into());
        }
        Ok(())
    }

    pub(crate) fn check_start(&self, start: &SimplexPoint) -> Result<()> {
        self.validate()?;
        if start.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: start.dimension(),
            });
        }
        Ok(())
    }
}

/// Result of one trial. `winner` is `None` when the step cap was hit.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkOutcome {
    pub dimension: usize,
    pub winner: Option<usize>,
    pub steps: u64,
    /// Pseudo-time: `steps·dt` for the continuum walk, `steps` for the game.
    pub elapsed: f64,
    /// Coordinates in the order they went to zero.
    pub elimination_order: Vec<usize>,
}

impl WalkOutcome {
    pub fn is_complete(&self) -> bool {
        self.winner.is_some()
    }

    /// Folds [`Error::StepLimitExceeded`] back into an incomplete outcome.
    pub fn from_result(result: Result<WalkOutcome>) -> Result<WalkOutcome> {
        match result {
            Err(Error::StepLimitExceeded { outcome }) => Ok(*outcome),
            other => other,
        }
    }
}

/// Receives the coordinates after every step (step 0 is the start).
pub trait StepObserver {
    fn observe(&mut self, step: u64, coords: &[f64]);

    /// Walkers skip building coordinate snapshots when this is false.
    fn enabled(&self) -> bool {
        true
    }
}

/// Observer that records nothing.
pub struct NoTrace;

impl StepObserver for NoTrace {
    fn observe(&mut self, _: u64, _: &[f64]) {}

    fn enabled(&self) -> bool {
        false
    }
}

impl<F: FnMut(u64, &[f64])> StepObserver for F {
    fn observe(&mut self, step: u64, coords: &[f64]) {
        self(step, coords)
    }
}

/// Runs one trial in the requested mode.
pub fn run_walk(
    mode: Mode,
    start: &SimplexPoint,
    config: &WalkConfig,
    trial_index: u64,
) -> Result<WalkOutcome> {
    run_walk_observed(mode, start, config, trial_index, &mut NoTrace)
}

pub fn run_walk_observed<O: StepObserver>(
    mode: Mode,
    start: &SimplexPoint,
    config: &WalkConfig,
    trial_index: u64,
    observer: &mut O,
) -> Result<WalkOutcome> {
    match mode {
        Mode::Discrete => run_discrete_game_observed(start, config, trial_index, observer),
        Mode::Continuum => run_continuum_walk_observed(start, config, trial_index, observer),
    }
}

/// Bookkeeping shared by both walkers: which coordinates remain and the
/// order the others dropped out.
#[derive(Debug)]
pub(crate) struct Survivors {
    pub active: Vec<usize>,
    pub eliminated: Vec<usize>,
}

impl Survivors {
    pub fn from_mask(mask: &[bool]) -> Self {
        let (active, eliminated) = (0..mask.len()).partition(|&i| mask[i]);
        Survivors { active, eliminated }
    }

    pub fn winner(&self) -> Option<usize> {
        match self.active.as_slice() {
            [w] => Some(*w),
            _ => None,
        }
    }

    pub fn outcome(self, dimension: usize, steps: u64, time_unit: f64) -> WalkOutcome {
        WalkOutcome {
            dimension,
            winner: self.winner(),
            steps,
            elapsed: steps as f64 * time_unit,
            elimination_order: self.eliminated,
        }
    }

    pub fn step_limit(self, dimension: usize, steps: u64, time_unit: f64) -> Error {
        let mut outcome = self.outcome(dimension, steps, time_unit);
        outcome.winner = None;
        Error::StepLimitExceeded {
            outcome: Box::new(outcome),
        }
    }
}
