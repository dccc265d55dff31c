//! Gap eigenvalues, criticality and the threshold state.

pub mod critical;
pub mod dense;
pub mod shooting;
pub mod track;

pub use critical::{
    c0_from_derivative, coupling_for_energy, critical_at, critical_identity_residual, find_critical_coupling, identity_residual,
    threshold_state, CriticalData, CriticalSummary,
};
pub use dense::dense_spectrum_oracle;
pub use shooting::{eigenvalues_below, eigenvalues_between, solve_bound_state, BoundState};
pub use track::{track_eigenvalue, BoundStateTrack, TrackSample};
