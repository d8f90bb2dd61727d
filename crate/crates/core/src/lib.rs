//! Quantum measurement as a first-passage random walk on the probability
//! simplex.
//!
//! A measured state `Σ a_i |i⟩` binds to its conjugate image in the
//! detector; the diagonal weights `|a_i|²` of the bound state are a point on
//! the simplex. A random walk from that point that stops at the first
//! vertex it reaches selects vertex `i` with probability `|a_i|²`.
//!
//! * [`state`] builds the start point from amplitudes.
//! * [`walk`] runs the discrete chips game and the continuum walk.
//! * [`analytic`] evaluates Green's functions, passage probabilities and
//!   passage-time distributions.
//! * [`stats`] aggregates trials and compares them with the analytic results.
//! * [`sim`] fans trials out over a thread pool deterministically.
//! * [`cli`] is the command-line front end.
//!
//! ```
//! use simplexwalk::{sim, stats, walk::{Mode, SimplexPoint, WalkConfig}};
//!
//! let start = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
//! let config = WalkConfig::discrete(2, 10).unwrap().with_seed(1);
//! let ensemble = sim::run_ensemble(&start, &config, Mode::Discrete, 20_000).unwrap();
//! let born = stats::compare_born(&ensemble, &[0.3, 0.7]).unwrap();
//! assert!(born.pass);
//! ```

pub mod analytic;
pub mod cli;
mod error;
pub mod sim;
pub mod state;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};

// The guide's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/walks.md")]
    mod walks {}
    #[doc = include_str!("../../../book/src/green.md")]
    mod green {}
    #[doc = include_str!("../../../book/src/passage_time.md")]
    mod passage_time {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    mod ensembles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
