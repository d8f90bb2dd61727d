//! Laplace-domain Green's functions of the diffusion equation with an
//! absorbing boundary, and the passage probabilities read off their
//! boundary fluxes.

use crate::error::{Error, Result};
use crate::walk::SIMPLEX_TOLERANCE;

/// Below this value of `s/D` the two-state Green's function switches to
/// its small-argument series (relative truncation error under `1e-16`).
pub const SERIES_THRESHOLD: f64 = 1e-8;

/// Only the three-state Green's function has been checked against the
/// unit-flux condition; other dimensions use the same construction but are
/// experimental.
pub const VALIDATED_DIMENSION: usize = 3;

fn check_diffusion(d: f64) -> Result<()> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("diffusion must be positive, got {d}")))
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {x} is outside [0, 1]")))
    }
}

fn check_simplex(name: &str, x: &[f64]) -> Result<()> {
    if x.len() < 2 {
        return Err(Error::DimensionTooSmall(x.len()));
    }
    if x.iter().any(|v| !v.is_finite() || *v < 0.0)
        || (x.iter().sum::<f64>() - 1.0).abs() > SIMPLEX_TOLERANCE
    {
        return Err(Error::domain(format!("{name} = {x:?} is not on the simplex")));
    }
    Ok(())
}

/// `sinh(a·z) / sinh(z)` for `z ≥ 0`, without overflow for large `z`.
/// Tends to `a` as `z → 0`.
pub(crate) fn sinh_ratio(a: f64, z: f64) -> f64 {
    if z == 0.0 {
        return a;
    }
    (-(1.0 - a) * z).exp() * (-2.0 * a * z).exp_m1() / (-2.0 * z).exp_m1()
}

/// Parameters of the two-state problem on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    pub diffusion: f64,
    /// Start coordinate `x0`, the weight of the state absorbed at `x = 1`.
    pub x0: f64,
    /// Laplace variable conjugate to pseudo-time.
    pub s: f64,
}

impl DiffusionParams {
    pub fn new(diffusion: f64, x0: f64, s: f64) -> Result<Self> {
        let p = DiffusionParams { diffusion, x0, s };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        check_diffusion(self.diffusion)?;
        check_unit("x0", self.x0)?;
        if !(self.s.is_finite() && self.s >= 0.0) {
            return Err(Error::domain(format!("s must be non-negative, got {}", self.s)));
        }
        Ok(())
    }
}

/// Two-state Green's function
/// `c̃(x,s) = sinh(√(s/D) x<) sinh(√(s/D)(1 − x>)) / (√(sD) sinh √(s/D))`
/// with `x< = min(x, x0)`, `x> = max(x, x0)`. Vanishes at both walls.
pub fn green_2state(x: f64, params: &DiffusionParams) -> Result<f64> {
    params.validate()?;
    check_unit("x", x)?;
    Ok(green_2state_ambient(x, params))
}

/// [`green_2state`] continued analytically past the walls; finite
/// differences across `x = 0` and `x = 1` need it.
pub fn green_2state_ambient(x: f64, params: &DiffusionParams) -> f64 {
    let d = params.diffusion;
    let lo = x.min(params.x0);
    let hi_gap = 1.0 - x.max(params.x0);
    let z2 = params.s / d;
    if z2 < SERIES_THRESHOLD {
        // sinh u ≈ u(1 + u²/6)
        let base = lo * hi_gap / d;
        return base * (1.0 + z2 * (lo * lo + hi_gap * hi_gap - 1.0) / 6.0);
    }
    let z = z2.sqrt();
    let (a, b) = (z * lo, z * hi_gap);
    // sinh a sinh b / sinh z with the exponentials factored out
    (a + b - z).exp() * (-2.0 * a).exp_m1() * (-2.0 * b).exp_m1()
        / (-2.0 * d * z * (-2.0 * z).exp_m1())
}

/// Boundary fluxes `(D ∂c̃/∂x at x=0, −D ∂c̃/∂x at x=1)` at Laplace variable `s`.
///
/// These are the Laplace transforms of the passage-time densities into each
/// wall; at `s = 0` they are the passage probabilities `(1 − x0, x0)`.
pub fn wall_flux_2state(params: &DiffusionParams) -> Result<(f64, f64)> {
    params.validate()?;
    let z = (params.s / params.diffusion).sqrt();
    Ok((
        sinh_ratio(1.0 - params.x0, z),
        sinh_ratio(params.x0, z),
    ))
}

/// Probabilities of absorption at `x = 0` and at `x = 1`: `(1 − x0, x0)`.
pub fn fpp_2state(x0: f64, diffusion: f64) -> Result<(f64, f64)> {
    check_diffusion(diffusion)?;
    check_unit("x0", x0)?;
    Ok((1.0 - x0, x0))
}

/// Parameters of the symmetric n-state Green's function on the simplex.
///
/// With `k = √(s/(nD))` the Green's function is
///
/// ```text
/// c̃(x, s) = A · Π_i cosh(k x_i<) · cosh(k (2 − Σ_i x_i>))
/// ```
///
/// where `x_i< = min(x_i, x0_i)` and `x_i> = max(x_i, x0_i)`. The constant
/// `A` is fixed by the unit-source condition
/// `Σ_i (−D/(n−1)) (∂c̃/∂x_i|x0_i+ε + ∂c̃/∂x_i|x0_i−ε) = 1`. Working it
/// through gives
///
/// ```text
/// A = (n − 1) / (D k B),   B = Π_i cosh(k x0_i) · Σ_i sinh(k(1 − x0_i)) / cosh(k x0_i)
/// ```
///
/// so the boundary sum `B` divides, and the vertex fluxes
/// `p_i = −D ∂c̃/∂x_i` at `x = e_i` become
/// `(n − 1) sinh(k x0_i) cosh(k x0_i) / B`, which tend to `x0_i` as `s → 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NGreenParams {
    x0: Vec<f64>,
    diffusion: f64,
    k: f64,
    boundary_sum: f64,
    normalization: f64,
}

impl NGreenParams {
    pub fn new(x0: &[f64], s: f64, diffusion: f64) -> Result<Self> {
        check_simplex("x0", x0)?;
        check_diffusion(diffusion)?;
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::domain(format!(
                "the n-state Green's function needs s > 0, got {s}"
            )));
        }
        let n = x0.len() as f64;
        let k = (s / (n * diffusion)).sqrt();
        let boundary_sum = x0.iter().map(|&x| (k * x).cosh()).product::<f64>()
            * x0
                .iter()
                .map(|&x| (k * (1.0 - x)).sinh() / (k * x).cosh())
                .sum::<f64>();
        let normalization = (n - 1.0) / (diffusion * k * boundary_sum);
        Ok(NGreenParams {
            x0: x0.to_vec(),
            diffusion,
            k,
            boundary_sum,
            normalization,
        })
    }

    pub fn dimension(&self) -> usize {
        self.x0.len()
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    /// Walk parameter `k = √(s/(nD))`.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// The multiplicative constant `A`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// `B = Π cosh(k x0_i) · Σ sinh(k(1 − x0_i)) / cosh(k x0_i)`.
    pub fn boundary_sum(&self) -> f64 {
        self.boundary_sum
    }

    /// Evaluates `c̃` at any `x` of the right length, on the simplex or not.
    pub fn eval_ambient(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        let k = self.k;
        let mut product = 1.0;
        let mut upper_sum = 0.0;
        for (&xi, &x0i) in x.iter().zip(&self.x0) {
            product *= (k * xi.min(x0i)).cosh();
            upper_sum += xi.max(x0i);
        }
        Ok(self.normalization * product * (k * (2.0 - upper_sum)).cosh())
    }

    /// Closed-form vertex fluxes `−D ∂c̃/∂x_i` at `x = e_i`.
    pub fn vertex_fluxes(&self) -> Vec<f64> {
        let n = self.dimension() as f64;
        self.x0
            .iter()
            .map(|&x| (n - 1.0) * (self.k * x).sinh() * (self.k * x).cosh() / self.boundary_sum)
            .collect()
    }
}

/// n-state Green's function at a point `x` of the simplex.
pub fn green_nstate(x: &[f64], params: &NGreenParams) -> Result<f64> {
    check_simplex("x", x)?;
    params.eval_ambient(x)
}

/// Vertex absorption probabilities from start `x0`: the start itself.
pub fn fpp_nstate(x0: &[f64]) -> Result<Vec<f64>> {
    check_simplex("x0", x0)?;
    Ok(x0.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: f64, x0: f64, s: f64) -> DiffusionParams {
        DiffusionParams::new(d, x0, s).unwrap()
    }

    #[test]
    fn walls_are_absorbing() {
        for (d, x0, s) in [(1.0, 0.3, 1.0), (0.5, 0.9, 100.0), (2.0, 0.5, 1e-12)] {
            let p = params(d, x0, s);
            assert_eq!(green_2state(0.0, &p).unwrap(), 0.0);
            assert!(green_2state(1.0, &p).unwrap().abs() < 1e-300);
        }
    }

    #[test]
    fn small_s_limit() {
        let g = green_2state(0.5, &params(1.0, 0.5, 1e-10)).unwrap();
        assert!((g - 0.25).abs() < 1e-6);
        // both sides of the series switch agree
        let below = green_2state(0.3, &params(1.0, 0.6, 0.999e-8)).unwrap();
        let above = green_2state(0.3, &params(1.0, 0.6, 1.001e-8)).unwrap();
        assert!((below - above).abs() < 1e-12);
    }

    #[test]
    fn large_s_does_not_overflow() {
        let g = green_2state(0.5, &params(1.0, 0.5, 1e7)).unwrap();
        assert!(g.is_finite() && g > 0.0);
        // near x0 the point source dominates: e^0/(2 D z)
        let z = 1e7_f64.sqrt();
        assert!((g - 1.0 / (2.0 * z)).abs() < 1e-12);
    }

    #[test]
    fn reciprocity() {
        let a = green_2state(0.2, &params(1.3, 0.7, 2.5)).unwrap();
        let b = green_2state(0.7, &params(1.3, 0.2, 2.5)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(green_2state(1.5, &params(1.0, 0.5, 1.0)).is_err());
        assert!(DiffusionParams::new(0.0, 0.5, 1.0).is_err());
        assert!(DiffusionParams::new(1.0, -0.1, 1.0).is_err());
        assert!(DiffusionParams::new(1.0, 0.5, -1.0).is_err());
        assert!(fpp_2state(1.1, 1.0).is_err());
        assert!(NGreenParams::new(&[0.5, 0.3, 0.3], 1e-8, 1.0).is_err());
        assert!(NGreenParams::new(&[0.5, 0.3, 0.2], 0.0, 1.0).is_err());
        let p = NGreenParams::new(&[0.5, 0.3, 0.2], 1e-8, 1.0).unwrap();
        assert!(green_nstate(&[0.6, 0.6, 0.0], &p).is_err());
        assert!(p.eval_ambient(&[0.5, 0.5]).is_err());
        assert!(fpp_nstate(&[0.5, 0.6]).is_err());
    }

    #[test]
    fn passage_probabilities() {
        assert_eq!(fpp_2state(0.5, 1.0).unwrap(), (0.5, 0.5));
        assert_eq!(fpp_2state(1.0, 1.0).unwrap(), (0.0, 1.0));
        for x0 in [0.1, 0.3, 0.9] {
            let (p0, p1) = fpp_2state(x0, 2.0).unwrap();
            assert!((p0 - (1.0 - x0)).abs() < 1e-15 && p1 == x0);
            assert_eq!(p0 + p1, 1.0);
            let (f0, f1) = wall_flux_2state(&params(2.0, x0, 0.0)).unwrap();
            assert!((f0 - p0).abs() < 1e-15 && (f1 - p1).abs() < 1e-15);
        }
    }

    #[test]
    fn nstate_examples() {
        assert_eq!(fpp_nstate(&[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        let third = 1.0 / 3.0;
        let p = NGreenParams::new(&[third, third, third], 0.5, 1.0).unwrap();
        let g = green_nstate(&[0.2, 0.3, 0.5], &p).unwrap();
        for perm in [[0.3, 0.2, 0.5], [0.5, 0.3, 0.2], [0.2, 0.5, 0.3]] {
            assert!((green_nstate(&perm, &p).unwrap() - g).abs() < 1e-12 * g);
        }
        let p = NGreenParams::new(&[0.5, 0.3, 0.2], 1e-8, 1.0).unwrap();
        let flux = p.vertex_fluxes();
        for (f, x) in flux.iter().zip([0.5, 0.3, 0.2]) {
            assert!((f - x).abs() < 1e-6);
        }
        assert!((flux.iter().sum::<f64>() - 1.0).abs() < 1e-6);
    }
}
