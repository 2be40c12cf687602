//! Simulation of adiabatic algorithms for the Bernstein-Vazirani and Simon
//! hidden-subgroup problems.
//!
//! The Hamiltonians used here are block diagonal in the input register, so
//! every input branch `|w⟩` evolves on its own. [`evolution`] exploits this to
//! replace a `2^{2n−1}`-dimensional Schrödinger evolution by two single-qubit
//! evolutions, and checks the shortcut against brute-force evolution of the
//! full state.
//!
//! Numerical code is generic over [`Real`]; the `*64` aliases below fix the
//! scalar to `f64`, which is what the protocols and CLI use.

pub mod error;
pub mod evolution;
pub mod gf2;
pub mod hamiltonians;
pub mod measurement;
pub mod oracles;
pub mod protocols;
pub mod qstate;
pub mod record;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type StateVector64 = qstate::StateVector<f64>;
pub type DenseOperator64 = qstate::DenseOperator<f64>;
pub type InterpolatedHamiltonian64 = hamiltonians::InterpolatedHamiltonian<f64>;
pub type EvolutionResult64 = evolution::EvolutionResult<f64>;
pub type MeasurementRecord64 = measurement::MeasurementRecord<f64>;
