//! Ising-model spectral invariants of finite simple graphs.
//!
//! Graphs map to classical invariants (energy spectra, bivariate and
//! multivariate Ising polynomials), transverse-field quantum spectra and
//! annealing sweeps, and Gibbs signature statistics. The [`scan`] module
//! searches graph families for non-isomorphic pairs that share an invariant.

extern crate openblas_src;

pub mod classical;
pub mod error;
pub mod graph;
pub mod quantum;
pub mod sampler;
pub mod scalar;
pub mod scan;

pub use error::{Error, Result};
pub use graph::{Graph, IntMatrix, IntPolynomial};
pub use scalar::{Coupling, Scalar};

pub type IsingParams64 = quantum::IsingParams<f64>;
pub type IsingParams32 = quantum::IsingParams<f32>;
pub type QuantumOperator64 = quantum::QuantumOperator<f64>;
pub type QuantumOperator32 = quantum::QuantumOperator<f32>;
pub type Spectrum64 = quantum::Spectrum<f64>;
pub type Spectrum32 = quantum::Spectrum<f32>;
pub type GibbsModel64 = sampler::GibbsModel<f64>;
pub type GibbsModel32 = sampler::GibbsModel<f32>;
