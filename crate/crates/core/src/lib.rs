//! Operator spreading in a random Clifford circuit whose qubits are swapped
//! out to an environment at rate `p`.
//!
//! The crate contains three simulation engines that describe the same
//! stochastic process at different levels of detail:
//!
//! * [`clifford`] evolves a single Pauli string under brick-wall random
//!   two-qubit Cliffords with stochastic swap-out (the OTOC picture);
//! * [`dp`] evolves occupation numbers directly under the vertex branching
//!   rules of the equivalent directed-percolation process, for any local
//!   dimension `q`;
//! * [`stabilizer`] evolves a full generator set to obtain entropies,
//!   coherent information and decoding fidelities.
//!
//! [`observables`] turns ensembles of trajectories into curves,
//! [`analysis`] extracts critical points and exponents, and [`oracle`]
//! provides brute-force references used by the test-suite.
//! [`runner`] drives experiments from the `radperc` binary.

pub mod analysis;
pub mod bits;
pub mod clifford;
pub mod dp;
mod error;
pub mod observables;
pub mod oracle;
pub mod pauli;
pub mod rng;
pub mod runner;
pub mod stabilizer;

pub use error::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;
