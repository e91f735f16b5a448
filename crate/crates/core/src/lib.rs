//! Monte Carlo laboratory for distributional identities of the normalized
//! Brownian excursion.
//!
//! Excursions are sampled as 3-dimensional Bessel bridges on a uniform time
//! grid. For each path the crate computes its occupation profile (total local
//! time, cumulative occupation and its inverse), the area and squared local
//! time functionals, weighted inverse integrals, the n-fold min-functionals,
//! and the Brownian motion obtained from the excursion through its SDE
//! representation. The [`stats`] module provides the Kolmogorov-Smirnov and
//! moment checks used by [`experiments`] to test the identities in law.

pub mod error;
pub mod experiments;
pub mod functionals;
pub mod occupation;
pub mod path;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use functionals::{FunctionalSample, Orientation};
pub use occupation::{occupation_profile, path_max, OccupationProfile};
pub use path::{sample_brownian_bridge, sample_excursion, PathGrid};
pub use rng::RngStream;
pub use stats::{MomentSummary, TestReport};
