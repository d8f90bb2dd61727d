//! The measured microsystem, its conjugate detector image, and the bound
//! system–detector state whose diagonal weights seed the walk.
//!
//! ```
//! use num_complex::Complex64;
//! use simplexwalk::state::{bind_compound, form_image, make_state, walk_seed};
//!
//! let state = make_state(&[Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)]).unwrap();
//! let image = form_image(&state);
//! let compound = bind_compound(&state, &image).unwrap();
//! let start = walk_seed(&compound);
//! assert!((start.coords()[0] - 0.36).abs() < 1e-12);
//! assert!((start.coords()[1] - 0.64).abs() < 1e-12);
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::walk::SimplexPoint;

/// Tolerance for the conjugate check in [`bind_compound`].
pub const IMAGE_TOLERANCE: f64 = 1e-12;

/// Normalized amplitude vector `Σ a_i |i⟩` of the measured system.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<Complex64>,
}

/// Detector-side image `Σ a_i* |i*⟩`: element-wise conjugate of a [`QuantumState`].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageState {
    amplitudes: Vec<Complex64>,
}

/// Diagonal weights `|a_i|²` of the bound state plus the magnitudes of the
/// passive off-diagonal terms `|a_i a_j*|`.
///
/// Phases of the cross-terms are not kept: the walk only moves the diagonal
/// weights, and the off-diagonal terms ride along passively.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundState {
    diagonal: Vec<f64>,
    // Row-major n×n; the diagonal of this matrix is unused and held at zero.
    cross: Vec<f64>,
}

impl QuantumState {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    /// Born weights `|a_i|²`.
    pub fn weights(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

impl ImageState {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    /// Reads the image amplitudes back as a system state (they are normalized).
    pub fn to_state(&self) -> QuantumState {
        QuantumState {
            amplitudes: self.amplitudes.clone(),
        }
    }
}

impl CompoundState {
    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// `|a_i a_j*|` for `i != j`; `None` on the diagonal.
    pub fn cross_magnitude(&self, i: usize, j: usize) -> Option<f64> {
        let n = self.dimension();
        if i == j || i >= n || j >= n {
            return None;
        }
        Some(self.cross[i * n + j])
    }
}

/// Scales `raw` to unit norm, keeping relative phases.
pub fn make_state(raw: &[Complex64]) -> Result<QuantumState> {
    if raw.len() < 2 {
        return Err(Error::DimensionTooSmall(raw.len()));
    }
    if raw.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::domain("amplitudes must be finite"));
    }
    // scaled accumulation avoids under/overflow
    let scale = raw.iter().map(|a| a.norm()).fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return Err(Error::ZeroVector);
    }
    let norm = scale
        * raw
            .iter()
            .map(|a| (a / scale).norm_sqr())
            .sum::<f64>()
            .sqrt();
    Ok(QuantumState {
        amplitudes: raw.iter().map(|a| a / norm).collect(),
    })
}

pub fn form_image(state: &QuantumState) -> ImageState {
    ImageState {
        amplitudes: state.amplitudes.iter().map(Complex64::conj).collect(),
    }
}

/// Binds a state to its image. Fails unless `image` is the conjugate of `state`.
pub fn bind_compound(state: &QuantumState, image: &ImageState) -> Result<CompoundState> {
    let n = state.dimension();
    if image.dimension() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: image.dimension(),
        });
    }
    for (index, (a, b)) in state.amplitudes.iter().zip(&image.amplitudes).enumerate() {
        if (a.conj() - b).norm() > IMAGE_TOLERANCE {
            return Err(Error::ImageMismatch { index });
        }
    }

    let diagonal = state.weights();
    let mut cross = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let m = (state.amplitudes[i] * image.amplitudes[j]).norm();
            cross[i * n + j] = m;
            cross[j * n + i] = m;
        }
    }
    Ok(CompoundState { diagonal, cross })
}

/// Starting point of the walk: the diagonal weights as simplex coordinates.
pub fn walk_seed(compound: &CompoundState) -> SimplexPoint {
    SimplexPoint::from_weights_unchecked(compound.diagonal.clone())
}

/// `make_state → form_image → bind_compound → walk_seed` in one call.
pub fn seed_from_amplitudes(raw: &[Complex64]) -> Result<SimplexPoint> {
    let state = make_state(raw)?;
    let image = form_image(&state);
    let compound = bind_compound(&state, &image)?;
    Ok(walk_seed(&compound))
}
