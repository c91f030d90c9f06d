//! Brute-force references for small systems: the exact Markov chain of the
//! particle process, dense-matrix Pauli conjugation, and a stabilizer
//! tableau that keeps every environment qubit explicitly.
//!
//! These share no arithmetic with the engines they check beyond the gate
//! samples and realization scripts fed to both.

mod dense;
mod markov;
mod tableau;

pub use dense::{dense_commutes, dense_conjugate, CliffordCatalog, Complex, DenseMatrix};
pub use markov::{exact_density, ExactCurves, MarkovKernel, MAX_MARKOV_SITES};
pub use tableau::{FullTableau, Script, ScriptStep, MAX_TABLEAU_SITES};
