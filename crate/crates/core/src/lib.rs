//! Average achievable rates and outage probabilities of a two-slot
//! cooperative-relaying NOMA link operating as an underlay secondary network
//! under a peak interference constraint.
//!
//! The crate evaluates every quantity three ways:
//!
//! * [`analytic`]: closed-form expressions (elementary functions for single
//!   antenna and selection combining, Meijer-G / bivariate Meijer-G for
//!   maximal-ratio combining),
//! * [`quad_oracle`]: adaptive quadrature of the defining integrals over the
//!   ratio densities in [`channels`],
//! * [`simulator`]: a seeded, worker-count independent Monte Carlo run of the
//!   two-slot protocol.
//!
//! [`optimizer`] performs the grid search over the power split.

pub mod analytic;
pub mod channels;
mod error;
pub mod model;
pub mod optimizer;
pub mod quad_oracle;
pub mod quadrature;
pub mod rng;
pub mod simulator;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{Combiner, DerivedThresholds, Method, Scheme, SystemConfig};

/// Crate version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
