//! Similarity-coordinate evolution inside the backward light cone, gauge
//! projection, blowup-time modulation and the exterior Duhamel solver.

mod evolve;
mod exterior;
mod gauge;
mod modulate;
mod rhs;

use blowup_geometry::GeometryError;
use linear_spectrum::SpectrumError;
use numerics_core::NumericsError;
use thiserror::Error;

pub use evolve::{evolve, evolve_with, ConeTrajectory, EvolveOptions, SpectralFilter};
pub use exterior::{
    duhamel_exterior, overlap_compare, richardson, ExteriorCone, ExteriorOptions, ExteriorSolution, OverlapReport,
};
pub use gauge::{gauge_projection, GaugeRepresenter};
pub use modulate::{data_map, modulate_t, ModulationOptions, ModulationResult};
pub use rhs::{full_rhs, nonlinearity, nonlinearity_c, profile_state, rhs, ConeRhs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Φ = Ψ − Ψ_* under the full nonlinearity
    Nonlinear,
    /// Φ = Ψ − Ψ_* under the linearization at Ψ_*
    Linearized,
    /// full state, no nonlinearity and no potential
    Free,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Nonlinear => "nonlinear",
            Mode::Linearized => "linearized",
            Mode::Free => "free",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("non-finite state; last good tau = {tau}")]
    Instability { tau: f64 },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("modulation failed: {0}")]
    ModulationFailure(String),
    #[error("Picard iteration failed: {0}")]
    IterationFailure(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T> = std::result::Result<T, EvolutionError>;
