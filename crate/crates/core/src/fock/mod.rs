//! The total-occupation-truncated Fock basis: multiset ranking of
//! occupation words, orthonormal Hermite functions, and encoding of
//! positions and observables as states.

mod basis;
mod hermite;
mod state;

pub use basis::{dimension, occupations, rank, unrank, FockBasis, OccupationWord, MAX_DIM};
pub use hermite::{hermite_table, hermite_value, p0, MAX_ABS_X, MAX_ORDER};
pub use state::{
    encode_observable, encode_position, truncated_normalization, ObservableSpec, ObservableTerm,
    StateVector,
};
