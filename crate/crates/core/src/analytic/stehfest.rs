//! Gaver–Stehfest inversion of real-axis Laplace transforms.
//!
//! `f(t) ≈ (ln 2 / t) Σ_{k=1}^{N} V_k F(k ln 2 / t)` with the Stehfest
//! weights `V_k`. The weights grow like `10^{0.45 N}` and alternate in
//! sign, so the sum is evaluated in double-double arithmetic; that keeps
//! orders up to [`MAX_ORDER`] free of cancellation noise.

use super::ddouble::DoubleDouble;
use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 14;
pub const MAX_ORDER: usize = 32;

/// Successive orders must agree to this in sup-norm on the grid.
pub const ORDER_AGREEMENT: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct GaverStehfest {
    weights: Vec<DoubleDouble>,
}

fn factorial(n: usize) -> DoubleDouble {
    (2..=n).fold(DoubleDouble::ONE, |acc, k| acc * k as f64)
}

impl GaverStehfest {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 || order % 2 != 0 || order > MAX_ORDER {
            return Err(Error::domain(format!(
                "Stehfest order must be even and in [2, {MAX_ORDER}], got {order}"
            )));
        }
        let half = order / 2;
        let weights = (1..=order)
            .map(|k| {
                let mut v = DoubleDouble::ZERO;
                for j in (k + 1) / 2..=k.min(half) {
                    let num = DoubleDouble::from(j as f64).powi(half as u32) * factorial(2 * j);
                    let den = factorial(half - j)
                        * factorial(j)
                        * factorial(j - 1)
                        * factorial(k - j)
                        * factorial(2 * j - k);
                    v = v + num / den;
                }
                if (k + half) % 2 == 1 {
                    -v
                } else {
                    v
                }
            })
            .collect();
        Ok(GaverStehfest { weights })
    }

    pub fn order(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[DoubleDouble] {
        &self.weights
    }

    /// Approximates `f(t)` from its transform `transform(s)`, `t > 0`.
    pub fn invert<F>(&self, transform: &F, t: f64) -> f64
    where
        F: Fn(DoubleDouble) -> DoubleDouble,
    {
        let a = DoubleDouble::LN_2 / t;
        let sum = self
            .weights
            .iter()
            .enumerate()
            .fold(DoubleDouble::ZERO, |acc, (i, &v)| {
                acc + v * transform(a * (i + 1) as f64)
            });
        (a * sum).to_f64()
    }
}

/// Inversion values on a grid together with the order that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub values: Vec<f64>,
    pub order: usize,
    /// Sup-norm gap to the previous order.
    pub gap: f64,
}

/// Inverts `transform` on `grid`, raising the order from `start_order` in
/// steps of two until orders `N − 2` and `N` agree to [`ORDER_AGREEMENT`].
/// Returns the order-`N` values.
pub fn invert_on_grid<F>(transform: F, grid: &[f64], start_order: usize) -> Result<Inversion>
where
    F: Fn(DoubleDouble) -> DoubleDouble,
{
    check_grid(grid)?;
    let eval = |order: usize| -> Result<Vec<f64>> {
        let gs = GaverStehfest::new(order)?;
        Ok(grid.iter().map(|&t| gs.invert(&transform, t)).collect())
    };
    let mut order = start_order;
    let mut prev = eval(order)?;
    let mut last_gap = f64::INFINITY;
    while order + 2 <= MAX_ORDER {
        let next = eval(order + 2)?;
        let gap = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if gap <= ORDER_AGREEMENT {
            return Ok(Inversion {
                values: next,
                order: order + 2,
                gap,
            });
        }
        last_gap = gap;
        order += 2;
        prev = next;
    }
    Err(Error::InversionUnstable {
        order: order - 2,
        gap: last_gap,
    })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain("time grid is empty"));
    }
    if grid[0].partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::domain("time grid must be strictly positive"));
    }
    if grid.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::domain("time grid must be strictly increasing"));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::domain("time grid must be finite"));
    }
    Ok(())
}
