//! ODE side of the resolvent analysis: the spectral ODE and its transforms,
//! Frobenius bases at both singular endpoints, adaptive continuation,
//! connection coefficients, mode-stability scans and Green-function
//! resolvents.

mod coeffs;
mod connection;
mod dopri;
mod frobenius;
mod green;

use numerics_core::{NumericsError, C64};
use thiserror::Error;

pub use coeffs::{
    a_of, inverse_transform_v, liouville_green_check, ode_coefficients, phi_map, transform_v, wave_map_potential,
    OdeCoefficients,
};
pub use connection::{
    hypergeom_c3, mode_stability_function, paper_connection, stability_m, winding_scan, write_scan_csv,
    ConnectionData, PaperConnection, PaperConnectionConfig, Rect, WindingCertificate, MATCH_POINT,
};
pub use dopri::{continue_solution, sample_solution, Dopri5, RTOL};
pub use frobenius::{basis_at_one, basis_at_zero, series_edge, Branch, Endpoint, LocalSolution};
pub use green::{green_resolvent, green_resolvent_points, lambda1_green, psi1_free, psi2_free, wronskian_free};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResolventError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resonant Frobenius indices at λ = {0}")]
    Resonance(C64),
    #[error("continuation failed near ρ = {rho}: {reason}")]
    Continuation { rho: f64, reason: String },
    #[error("winding scan inconclusive: phase step {step} after refinement")]
    Inconclusive { step: f64 },
    #[error("λ = {0} is (numerically) an eigenvalue")]
    EigenvalueCollision(C64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, ResolventError>;
