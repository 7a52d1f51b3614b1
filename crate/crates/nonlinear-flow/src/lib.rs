//! Radial energy-critical nonlinear waves: the map Φ sending small data to
//! the time-zero state of the non-radiative nonlinear solution with the same
//! truncation π_R, and the wave operator sending a radiation field to the
//! nonlinear solution that scatters to it.
//!
//! Both are Picard iterations over a finite time window. Every result carries
//! a power-law estimate of the source mass discarded outside the window.

mod nonlinearity;
mod phi;
mod picard;
mod wave_operator;

pub use nonlinearity::{evaluate_nonlinearity, nonlinearity_with_norm, NonlinearityConfig};
pub use phi::{calibrate_epsilon, phi_checks, phi_map, PhiChecks, PhiResult, EXTERIOR_TOL, PI_R_TOL};
pub use picard::{PicardConfig, PicardReport};
pub use wave_operator::{
    backward_duhamel, find_start_time, wave_operator, wave_operator_checks, WaveOperatorChecks, WaveOperatorResult,
};

use field_core::FieldError;

#[derive(Debug, thiserror::Error)]
pub enum NonlinearError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Hankel(#[from] spectral_hankel::HankelError),
    #[error(transparent)]
    Lightcone(#[from] lightcone_transform::LightconeError),
    #[error(transparent)]
    Plr(#[from] plr_space::PlrError),
    #[error(transparent)]
    Exterior(#[from] exterior_energy::ExteriorError),
    #[error(transparent)]
    Duhamel(#[from] duhamel_engine::DuhamelError),
    #[error("nonlinear evaluation is implemented for radial states only")]
    NonRadial,
    #[error("Picard iteration did not converge after {} iterations (last ratio {:?}); shrink the data or enlarge the window", .0.iterations, .0.last_ratio())]
    Divergence(Box<PicardReport>),
}
