//! Polynomial ODE systems with zero-sum interaction couplings: validation,
//! evaluation, rescaling and the classical reference integrator.

mod integrate;
mod system;

pub use integrate::{
    integrate_dopri, integrate_reference, IntegratorOptions, IntegratorStats, Trajectory,
};
pub use system::{
    validate_system, Interaction, InteractionDraft, OdeSystem, SystemConstants, SystemDraft,
    ValidationReport, Violation, LARGE_DEGREE_WARNING, ZERO_SUM_TOL,
};
