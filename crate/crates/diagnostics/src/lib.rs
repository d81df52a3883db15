//! Strichartz, weighted-cone and energy norms of trajectories, plus the
//! dissipativity, nonlinearity-bound and δ-scaling experiments built on them.

mod comparison;
mod cone;
mod dissipativity;
mod nonlinear;
mod sampling;
mod scaling;
mod strichartz;

use blowup_geometry::GeometryError;
use cone_evolution::EvolutionError;
use numerics_core::NumericsError;
use thiserror::Error;

pub use comparison::{norm_comparison_4d_6d, NormComparison};
pub use cone::{
    cone_snapshot, weighted_cone_norm, ConeNormSpec, ConeReference, Difference, LiftedTrajectory, PhysicalField,
    ProfileField, TimeRule,
};
pub use dissipativity::{
    dissipativity_check, free_generator, norm_equivalence_report, norm_ratio, NormEquivalenceReport,
};
pub use nonlinear::{
    growth_bound_rhs, lipschitz_bound_rhs, nonlinear_remainder, nonlinearity_bound_report, remainder,
    NonlinearityReport,
};
pub use sampling::{random_samples, RandomSmooth};
pub use scaling::{delta_scaling_experiment, gauge_free_bump, ScalingEntry, ScalingOptions, ScalingReport};
pub use strichartz::{
    check_admissible, norm_report, spatial_trace, strichartz_field, strichartz_norm, write_norm_trace_csv, Field,
    LqRule, NormEntry, NormReport, ZEROTH_ORDER_PAIRS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T> = std::result::Result<T, DiagnosticsError>;
