//! The light-cone (radiation) transform on odd-dimensional linked grids.

pub mod exact;
mod profile;
mod transform;

pub use exact::{PowerLawProfile, PowerPiece};
pub use profile::RadiationProfile;
pub use transform::{
    analyze, apply_T, apply_dsT, c0, invert_radiation, invert_slot, partial_inverse_g, radiation_field,
    restrict_outside, slot_parity, t_parity, tau, LightconeError,
};
