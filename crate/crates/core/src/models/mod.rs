//! Generators for the oscillator, Duffing and Kuramoto reductions, random
//! valid systems, and physical-coordinate observables.

mod duffing;
mod harmonic;
mod kuramoto;
mod polynomial;
mod random;
mod transform;

pub use duffing::{make_duffing, DuffingEdge, DuffingSpec};
pub use harmonic::{harmonic_energy, make_harmonic, HarmonicSpec};
pub use kuramoto::{
    kuramoto_phase_recover, kuramoto_reference, kuramoto_state, kuramoto_transform, make_kuramoto,
    KuramotoSpec, MIN_PHASE_RADIUS_SQ,
};
pub use polynomial::Polynomial;
pub use random::{random_system, RandomSystemSpec};
pub use transform::Transform;
