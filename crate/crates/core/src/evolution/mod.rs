//! Krylov propagation of truncated states and comparison with the
//! classical reference.

mod compare;
mod krylov;

pub use compare::{
    classical_observable, compare, convergence_sweep, output_series, uniform_grid, write_sweep_csv,
    ComparisonTable, SweepRow, IMAG_RESIDUE_LIMIT,
};
pub use krylov::{
    evolve, evolve_streaming, EvolutionResult, EvolveOptions, EvolveStats, DEFAULT_KRYLOV_DIM,
    DEFAULT_MAX_SUBSTEPS,
};
