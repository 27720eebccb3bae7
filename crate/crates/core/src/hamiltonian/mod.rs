//! Sparse truncated Hamiltonians and their norm certificates.

mod build;
mod certificate;
mod csv;
mod matrix;

pub use build::{
    build_hamiltonian, build_hamiltonian_with, check_number_conserving, split_linear_interaction,
    BuildOptions, MAX_INTERACTION_SIZE,
};
pub use certificate::{
    norm_certificate, spectral_norm_estimate, NormCertificate, SpectralEstimate,
    SPECTRAL_ITERATIONS,
};
pub use csv::{read_csv, write_csv};
pub use matrix::SparseHermitianMatrix;
