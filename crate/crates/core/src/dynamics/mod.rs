//! Single-gate equations of motion: contact geometry, impulse collisions,
//! constraint-mode dynamics, and the Euler stepper that switches between
//! them.

pub mod collision;
pub mod constraint;
pub mod contact;
pub mod step;

pub use collision::{PointImpact, TangentialImpact, collide_point, collide_tangential};
pub use contact::{ContactGeom, ContactQuery, classify};
pub use step::{
    Engine, Outcome, StepStats, TrajRecord, TrialOptions, TrialResult, energy_ledger_residual,
    run_trial, run_trial_from,
};
