//! Closed-form results for the diffusion picture of the walk: Green's
//! functions in the Laplace domain, passage probabilities from their
//! boundary fluxes, the mean passage time, and the passage-time density by
//! numerical Laplace inversion.

pub mod ddouble;
mod green;
mod passage;
pub mod stehfest;

pub use green::{
    fpp_2state, fpp_nstate, green_2state, green_2state_ambient, green_nstate, wall_flux_2state,
    DiffusionParams, NGreenParams, SERIES_THRESHOLD, VALIDATED_DIMENSION,
};
pub use passage::{
    fpt_cdf_2state, fpt_density_2state, fpt_density_inversion, mfpt_2state, passage_transform,
};
