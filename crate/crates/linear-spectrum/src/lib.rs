//! Collocation discretization of the linearized generator, its spectrum,
//! spurious-mode filtering and direct resolvent solves.

mod eigen;
mod filter;
mod operator;
mod resolvent;

use numerics_core::{NumericsError, C64};
use thiserror::Error;

pub use eigen::{eigenpairs, gauge_left_vector, EigenPair};
pub use filter::{chebyshev_tail, filter_physical, spectral_ode_residual, FilterConfig, SpectrumReport};
pub use operator::{assemble_generator, potential, OperatorMatrix};
pub use resolvent::{jordan_inconsistency, resolvent_backward_error, resolvent_solve};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("eigensolver failed: {0}")]
    EigenFailure(String),
    #[error("resolvent is singular near λ = {nearest}")]
    ResolventSingular { nearest: C64 },
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, SpectrumError>;
