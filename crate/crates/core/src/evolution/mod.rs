//! Time-dependent propagation and the observables built on it.

pub mod observables;
pub mod propagate;
pub mod schedule;

pub use observables::*;
pub use propagate::{
    propagate, step_length, EvolutionResult, PropagationOptions, DEFAULT_STEP_FACTOR, MAX_STEP_FACTOR, NORM_FAILURE,
    NORM_TOLERANCE,
};
pub use schedule::{Schedule, SigmaProfile};
