//! Killed diffusions and Dirichlet spectra on Euclidean domains, the
//! Heisenberg group, SU(2) and the Sierpiński gasket.
//!
//! The crate discretises Dirichlet-restricted generators, computes their
//! low spectrum, and checks spectral, scaling, small-deviation and
//! heat-content predictions against seeded killed-diffusion Monte Carlo.

pub mod contraction;
pub mod discrete;
pub mod error;
pub mod kernels;
pub mod scaling;
pub mod space;
pub mod sparse;
pub mod spectral;
pub mod stochastic;

pub use error::{Error, Result};
pub use space::{
    chart_distance, make_domain, Domain, Gauge, GaugeKind, GeneratorScale, Point, Shape, SpaceKind, SpaceModel,
};
