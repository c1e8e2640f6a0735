//! Nonsmooth rank-one tensor objectives and tools for studying their landscape.
//!
//! * [`objectives`]: the `f₁`, `f_p`, `h_p`, `f_∞` family over all index
//!   tuples, dense order-2 LS/LAV losses, and the ratio-product region.
//! * [`stationarity`]: Clarke intervals, staircase functions and remark points.
//! * [`landscape`]: a grid oracle for "every local minimum is global" claims.
//! * [`gallery`]: named example and counterexample functions.
//! * [`solvers`]: SGD with heavy-ball momentum and plain subgradient descent.
//! * [`experiments`]: the sparse-noise recovery sweep.

pub mod error;
pub mod experiments;
pub mod gallery;
pub mod landscape;
pub mod objectives;
pub mod rng;
pub mod solvers;
pub mod stationarity;

pub use error::{Error, Result};
