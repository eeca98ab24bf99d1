//! Nonstabilizerness ("magic") measures for pure qubit states.
//!
//! The central quantity is the basis-minimised stabilizerness asymmetry
//! `A_α(ψ)`: the smallest Rényi-α entropy of the outcome distribution of
//! `ψ` measured in any stabilizer basis. It is computed exactly by
//! exhaustive search ([`bmsa::bmsa_bruteforce`]) or branch and bound
//! ([`bmsa::bmsa_branch_bound`]), and bounded from above by simulated
//! annealing over Clifford circuits ([`anneal::anneal_minimize`]).
//!
//! Alongside sit the stabilizer Rényi entropies, stabilizer fidelity,
//! nullity and G-asymmetries ([`measures`]), state generators and a sparse
//! near-Clifford simulator ([`simkit`]).
//!
//! All entropies are natural-log (nats). Basis index convention: qubit `j`
//! is bit `j` of a basis index.

pub mod anneal;
pub mod bmsa;
pub mod clifford;
pub mod entropy;
pub mod error;
pub mod f2linalg;
pub mod measures;
pub mod pauli;
pub mod simkit;
pub mod statevec;

pub use bmsa::{BbOptions, BmsaResult, StabBasisKey};
pub use clifford::CliffordTableau;
pub use error::{MagicError, Result};
pub use pauli::PauliString;
pub use statevec::Statevector;
