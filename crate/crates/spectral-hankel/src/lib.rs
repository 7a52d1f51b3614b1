//! Per-mode Fourier–Bessel transforms on the linked grid and the free wave
//! propagator as a frequency multiplier.

pub mod bessel;
mod dalembert;
mod hankel;
pub mod odd_fourier;
mod propagate;
mod transform;

pub use dalembert::dalembert_oracle_d3;
pub use hankel::{
    fourier_constant, from_w, hankel_forward, hankel_inverse, phase, radial_derivative, state_from_physical,
    tail_mass, to_w, transform_for, vhat, with_physical, HankelError, TAIL_ERROR, TAIL_WARN,
};
pub use odd_fourier::{OddFourier, Sign};
pub use propagate::{free_propagate, rotate};
pub use transform::ModeTransform;
