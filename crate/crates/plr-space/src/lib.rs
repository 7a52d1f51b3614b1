//! The non-radiative space P_L(R) of the linear wave equation: power-law
//! tails per degree, the compact part, and the orthogonal projection π_R.
//!
//! The light-cone transform is an isometry onto profiles with fixed parity,
//! and P_L(R) is exactly the set of states whose profiles vanish on |s| > R.
//! π_R therefore truncates both profiles to [-R, R] and inverts.

mod basis;
mod projection;

pub use basis::{alpha, plr_basis, PlrBasisSpec};
pub use projection::{
    is_nonradiative_linear, materialize, pi_r, project_pr, ModeCoefficients, NonradiativeReport, PlrElement,
    MAX_CONDITION, NONRADIATIVE_TOL,
};

use field_core::FieldError;
use lightcone_transform::LightconeError;

#[derive(Debug, thiserror::Error)]
pub enum PlrError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Lightcone(#[from] LightconeError),
    #[error(transparent)]
    Exterior(#[from] exterior_energy::ExteriorError),
    #[error("cone base R must be positive, got {0}")]
    Radius(f64),
    #[error("grid extent {extent} does not exceed R = {radius}")]
    Extent { extent: f64, radius: f64 },
    #[error("Gram matrix condition estimate {0:.3e} exceeds the limit")]
    Conditioning(f64),
}
