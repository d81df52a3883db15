//! Grids, spectral differentiation, quadrature, complex special functions
//! and the radial function-space norms used by the rest of the lab.

pub mod bessel;
pub mod error;
pub mod gamma;
pub mod grid;
pub mod norms;
pub mod quadrature;
pub mod state;

pub use num_complex::Complex64 as C64;

pub use bessel::{cyl_bessel, cyl_bessel_deriv, BesselKind};
pub use error::NumericsError;
pub use gamma::log_gamma;
pub use grid::{build_grid, RadialGrid};
pub use norms::{h_norm, hardy_ratio, htilde_inner, sobolev_norm, HardyVariant, SobolevSpec};
pub use state::StatePair;

pub type Result<T> = std::result::Result<T, NumericsError>;
