//! Magnitude of metric spaces: exact values for finite spaces and graphs,
//! Monte Carlo and quadrature estimates of partial magnitude for manifolds,
//! and reference closed forms.

pub mod cli;
pub mod closed_forms;
pub mod empirical_approx;
pub mod error;
pub mod finite_mag;
pub mod graph_mag;
pub mod linalg;
pub mod mc_engine;
pub mod quadrature;
pub mod spaces;
pub mod weight_measures;

pub use error::{Error, Result};
