//! Eigensolvers, resonance tracking, analyticity probes and the resolvent audit.

pub mod eigs;
pub mod perturbation;
pub mod probes;
pub mod resolvent;
pub mod sparse;
pub mod tracking;

pub use eigs::{cluster_values, eigs, Cluster, SpectrumResult, CLUSTER_TOL};
pub use perturbation::perturbation2_oracle;
pub use probes::{cauchy_riemann_probe, CauchyRiemann};
pub use resolvent::{resolvent_audit, resolvent_bound_check, ResolventAudit, ResolventRegion, Sector};
pub use sparse::{shift_invert, ShiftInvertOptions};
pub use tracking::{nonincreasing, 
    kappa_path, theta_independence, track_resonance, PathPoint, ResonanceTrajectory, Seed, ThetaIndependence,
    TrackOptions,
};
