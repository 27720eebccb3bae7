//! Classical simulation and verification of Koopman–von Neumann embeddings
//! for conservative polynomial ODE systems.
//!
//! A system `dx_i/dt = Σ_{p ∋ i} α_{p→i} Π_{j ∈ p \ i} x_j` whose interaction
//! couplings sum to zero is mapped to a sparse Hamiltonian on the Fock space
//! truncated at total occupation `m`. The crate builds that Hamiltonian,
//! evolves Hermite-encoded states under it, reads out polynomial
//! observables, and checks everything against a Runge–Kutta reference.

pub mod error;
pub mod estimator;
pub mod evolution;
pub mod fock;
pub mod hamiltonian;
pub mod io;
pub mod models;
pub mod ode;

pub use error::{Error, Result};
