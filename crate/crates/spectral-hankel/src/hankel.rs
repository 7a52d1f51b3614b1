use num_complex::Complex64;
use std::f64::consts::PI;

use field_core::{CauchyData, Dimension, FieldError, Grid, ModeIndex, ModeState, RadialProfile};

use crate::transform::ModeTransform;

/// Relative tail mass above which a forward transform is rejected.
pub const TAIL_ERROR: f64 = 1e-4;
/// Relative tail mass above which a forward transform logs a warning.
pub const TAIL_WARN: f64 = 1e-10;
/// Fraction of the outermost cells inspected for truncation.
const TAIL_FRACTION: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum HankelError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("profile not decayed at r_max: relative tail mass {tail:.3e} exceeds {limit:.1e}")]
    Truncation { tail: f64, limit: f64 },
    #[error("mode {0} rejected: {1}")]
    Mode(ModeIndex, String),
}

pub fn transform_for(mode: &ModeIndex, grid: Grid) -> std::sync::Arc<ModeTransform> {
    ModeTransform::shared(mode.bessel_index(), grid)
}

/// w = r^{(d-1)/2} v.
pub fn to_w(mode: &ModeIndex, grid: &Grid, v: &[f64]) -> Vec<f64> {
    let p = mode.radial_weight_power() as i32;
    v.iter().enumerate().map(|(j, x)| x * grid.r(j).powi(p)).collect()
}

/// v = r^{-(d-1)/2} w.
pub fn from_w(mode: &ModeIndex, grid: &Grid, w: &[f64]) -> Vec<f64> {
    let p = mode.radial_weight_power() as i32;
    w.iter().enumerate().map(|(j, x)| x * grid.r(j).powi(-p)).collect()
}

/// Fraction of Σ w² carried by the outermost 5% of the cells.
pub fn tail_mass(w: &[f64]) -> f64 {
    let total: f64 = w.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return 0.0;
    }
    let start = ((1.0 - TAIL_FRACTION) * w.len() as f64) as usize;
    w[start..].iter().map(|x| x * x).sum::<f64>() / total
}

/// Spectral samples from the physical view.
pub fn hankel_forward(p: &RadialProfile) -> Result<RadialProfile, HankelError> {
    let v = p
        .physical
        .as_ref()
        .ok_or_else(|| FieldError::MissingPhysical(format!("profile {}", p.mode)))?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(FieldError::NonFinite("physical samples".into()).into());
    }
    let w = to_w(&p.mode, &p.grid, v);
    let tail = tail_mass(&w);
    if tail > TAIL_ERROR {
        return Err(HankelError::Truncation { tail, limit: TAIL_ERROR });
    }
    if tail > TAIL_WARN {
        log::warn!("profile {} truncated at r_max: relative tail mass {tail:.3e}", p.mode);
    }
    let spectral = transform_for(&p.mode, p.grid).forward_w(&w);
    Ok(RadialProfile { mode: p.mode, grid: p.grid, spectral, physical: Some(v.clone()) })
}

/// Physical view from the spectral samples.
pub fn hankel_inverse(p: &RadialProfile) -> RadialProfile {
    let w = transform_for(&p.mode, p.grid).inverse_w(&p.spectral);
    RadialProfile { physical: Some(from_w(&p.mode, &p.grid, &w)), ..p.clone() }
}

/// v'(r_j) from the spectral samples.
pub fn radial_derivative(p: &RadialProfile) -> Vec<f64> {
    let t = transform_for(&p.mode, p.grid);
    let w = t.inverse_w(&p.spectral);
    let dw = t.inverse_dw(&p.spectral);
    let pw = p.mode.radial_weight_power();
    (0..p.grid.cells())
        .map(|j| {
            let r = p.grid.r(j);
            r.powf(-pw) * (dw[j] - pw * w[j] / r)
        })
        .collect()
}

/// Attaches physical views to every slot.
pub fn with_physical(state: &CauchyData) -> CauchyData {
    let modes = state
        .modes
        .iter()
        .map(|(m, s)| (*m, ModeState { field: hankel_inverse(&s.field), velocity: hankel_inverse(&s.velocity) }))
        .collect();
    CauchyData { dim: state.dim, grid: state.grid, modes }
}

/// Builds a single-mode state from physical samples of both slots.
pub fn state_from_physical(mode: ModeIndex, grid: Grid, v0: Vec<f64>, v1: Vec<f64>) -> Result<CauchyData, HankelError> {
    let field = hankel_forward(&RadialProfile::zeros(mode, grid).with_physical(v0)?)?;
    let velocity = hankel_forward(&RadialProfile::zeros(mode, grid).with_physical(v1)?)?;
    Ok(CauchyData::single(field, velocity)?)
}

/// (2π)^{d/2} √(2/π): v̂(ρω) = C (-i)^l ρ^{-(d-1)/2} B(ρ) Y(ω).
pub fn fourier_constant(d: Dimension) -> f64 {
    (2.0 * PI).powf(d.as_f64() / 2.0) * (2.0 / PI).sqrt()
}

/// (-i)^l.
pub fn phase(l: u32) -> Complex64 {
    match l % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Samples of the d-dimensional Fourier coefficient v̂(ρ_k ω) of the mode.
pub fn vhat(p: &RadialProfile) -> Vec<Complex64> {
    let c = fourier_constant(p.mode.d) * phase(p.mode.l);
    let e = p.mode.radial_weight_power();
    p.spectral
        .iter()
        .enumerate()
        .map(|(k, b)| c * (b * p.grid.rho(k).powf(-e)))
        .collect()
}
