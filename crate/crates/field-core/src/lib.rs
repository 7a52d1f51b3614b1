//! Domain types for per-mode wave data: spherical-harmonic channels, the linked
//! radial / frequency / light-cone grid, Cauchy pairs, trajectories, sources,
//! the H inner product and the X / W / N diagnostics.

mod container;
mod error;
mod grid;
mod mode;
pub mod norms;
mod state;

pub use container::{ArrayEntry, Container, Header};
pub use error::FieldError;
pub use grid::{FrequencyGrid, Grid, RadialGrid};
pub use mode::{harmonic_dim, Dimension, ModeIndex, Slot};
pub use norms::{norm_n, norm_w, norm_x};
pub use state::{h_inner, CauchyData, ModeState, RadialProfile, SourceTerm, Trajectory};
