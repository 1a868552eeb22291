//! Forward and inverse spectral problems for Sturm-Liouville operators with
//! distributional potentials `q = σ'`, `σ ∈ L²(0, π)`, under Dirichlet
//! conditions.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiments;
pub mod forward;
pub mod inverse;
pub mod ode;
pub mod parallel;
pub mod potential;
pub mod quadrature;
pub mod spectral_data;

pub use error::{Error, Result};
pub use forward::{ForwardSolver, Normalization, ShootingResult, SpectralData};
pub use potential::{PotentialQ, SigmaFunction, Smoothness};
