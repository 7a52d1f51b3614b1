//! Source-driven linear solves: the Duhamel integral from -∞, the forward
//! scattering state it produces, and the non-radiative source solve.
//!
//! Sources are sampled at time nodes and read as piecewise linear in time.
//! Against such a source the per-frequency Duhamel integrals have closed
//! forms, so every time step is exact and the only approximation left is the
//! spatial one.

mod duhamel;
pub mod filon;
mod nonradiative;

pub use duhamel::{duhamel_from_minus_infinity, extract_scattering, DuhamelSolution, ScatteringDecomposition};
pub use nonradiative::{
    directional_energies, linearity_defect, nonradiative_source_solve, NonradiativeSolution, NonradiativeSolveReport,
    SolveConfig, ENERGY_TOL, LINEARITY_TOL, MEASURE_TOL, PROJECTION_TOL, RESIDUAL_TOL,
};

use field_core::FieldError;

#[derive(Debug, thiserror::Error)]
pub enum DuhamelError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Lightcone(#[from] lightcone_transform::LightconeError),
    #[error(transparent)]
    Plr(#[from] plr_space::PlrError),
    #[error(transparent)]
    Exterior(#[from] exterior_energy::ExteriorError),
    #[error("source support {support:?} is not contained in its time nodes {nodes:?}")]
    UnboundedSupport { support: (f64, f64), nodes: (f64, f64) },
    #[error("cone base R must be positive, got {0}")]
    Radius(f64),
    #[error("postcondition check failed: {0:?}")]
    Postcondition(Box<NonradiativeSolveReport>),
}
