//! Passage times of the two-state walk: the mean in closed form, the
//! density and distribution by inverting the total wall flux.

use super::ddouble::DoubleDouble;
use super::stehfest::{invert_on_grid, Inversion, DEFAULT_ORDER};
use crate::error::{Error, Result};

/// Mean absorption time from `x0` on `[0, 1]`: `x0(1 − x0)/(2D)`, the
/// solution of `D·T'' = −1` with `T(0) = T(1) = 0`.
pub fn mfpt_2state(x0: f64, diffusion: f64) -> Result<f64> {
    check(x0, diffusion)?;
    Ok(x0 * (1.0 - x0) / (2.0 * diffusion))
}

fn check(x0: f64, diffusion: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::domain(format!("x0 = {x0} is outside [0, 1]")));
    }
    if !(diffusion.is_finite() && diffusion > 0.0) {
        return Err(Error::domain(format!("diffusion must be positive, got {diffusion}")));
    }
    Ok(())
}

/// `sinh(a·z)/sinh(z)` in double-double, overflow-free for large `z`.
fn sinh_ratio_dd(a: DoubleDouble, z: DoubleDouble) -> DoubleDouble {
    if z.hi() == 0.0 {
        return a;
    }
    let decay = (-(z * (DoubleDouble::ONE - a))).exp();
    decay * (-(z * a * 2.0)).expm1() / (-(z * 2.0)).expm1()
}

/// Laplace transform of the passage-time density: the flux into both walls,
/// `[sinh(z x0) + sinh(z(1 − x0))] / sinh z` with `z = √(s/D)`.
pub fn passage_transform(x0: f64, diffusion: f64, s: DoubleDouble) -> DoubleDouble {
    let z = (s / diffusion).sqrt();
    let x0 = DoubleDouble::from(x0);
    sinh_ratio_dd(x0, z) + sinh_ratio_dd(DoubleDouble::ONE - x0, z)
}

/// Passage-time density with the Stehfest order it converged at.
pub fn fpt_density_inversion(x0: f64, diffusion: f64, t_grid: &[f64]) -> Result<Inversion> {
    check(x0, diffusion)?;
    invert_on_grid(
        |s| passage_transform(x0, diffusion, s),
        t_grid,
        DEFAULT_ORDER,
    )
}

/// First-passage-time density of the two-state walk on `t_grid`.
pub fn fpt_density_2state(x0: f64, diffusion: f64, t_grid: &[f64]) -> Result<Vec<f64>> {
    Ok(fpt_density_inversion(x0, diffusion, t_grid)?.values)
}

/// Cumulative passage-time distribution, inverted from `F̃(s)/s`.
pub fn fpt_cdf_2state(x0: f64, diffusion: f64, t_grid: &[f64]) -> Result<Vec<f64>> {
    check(x0, diffusion)?;
    Ok(invert_on_grid(
        |s| passage_transform(x0, diffusion, s) / s,
        t_grid,
        DEFAULT_ORDER,
    )?
    .values)
}
