use std::collections::BTreeMap;

use serde::Serialize;

use field_core::{norm_n, Dimension, FieldError, ModeIndex, RadialProfile, SourceTerm, Trajectory};
use spectral_hankel::{to_w, transform_for};

use crate::NonlinearError;

/// f(x) = σ|x|^{q-1}x with q = (d+2)/(d-2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlinearityConfig {
    pub dim: Dimension,
    pub q: f64,
    /// +1 focusing, -1 defocusing.
    pub sigma: f64,
}

impl NonlinearityConfig {
    pub fn new(dim: Dimension, sigma: f64) -> Self {
        Self { dim, q: dim.critical_exponent(), sigma: sigma.signum() }
    }

    pub fn defocusing(dim: Dimension) -> Self {
        Self::new(dim, -1.0)
    }

    pub fn focusing(dim: Dimension) -> Self {
        Self::new(dim, 1.0)
    }

    pub fn f(&self, x: f64) -> f64 {
        self.sigma * x.abs().powf(self.q - 1.0) * x
    }

    /// f applied to the radial mode coefficient v of u = v Y_0, returned as a coefficient again.
    pub fn f_coefficient(&self, v: f64) -> f64 {
        let y0 = 1.0 / self.dim.sphere_area().sqrt();
        self.f(v * y0) / y0
    }
}

/// Pointwise f(u) on every slice, transformed back to spectral samples.
pub fn evaluate_nonlinearity(tr: &Trajectory, cfg: &NonlinearityConfig) -> Result<SourceTerm, NonlinearError> {
    let first = tr.states.first().ok_or(FieldError::EmptyTrajectory)?;
    let (dim, grid) = (first.dim, first.grid);
    let mode = ModeIndex::radial(dim);
    let values = tr
        .states
        .iter()
        .map(|s| {
            if !s.is_radial() {
                return Err(NonlinearError::NonRadial);
            }
            let mut slice = BTreeMap::new();
            if let Some(ms) = s.modes.get(&mode) {
                let v = ms.field.physical.as_ref().ok_or_else(|| FieldError::MissingPhysical("field slot".into()))?;
                let fv: Vec<f64> = v.iter().map(|x| cfg.f_coefficient(*x)).collect();
                if fv.iter().any(|x| *x != 0.0) {
                    // No truncation check: f(u) lives on the same finite domain as u.
                    let spectral = transform_for(&mode, grid).forward_w(&to_w(&mode, &grid, &fv));
                    slice.insert(mode, RadialProfile { mode, grid, spectral, physical: Some(fv) });
                }
            }
            Ok(slice)
        })
        .collect::<Result<Vec<_>, NonlinearError>>()?;
    let n = tr.times.len();
    Ok(SourceTerm::new(dim, grid, tr.times.clone(), values, (tr.times[0], tr.times[n - 1]))?)
}

/// ‖f(u)‖_N together with the source.
pub fn nonlinearity_with_norm(tr: &Trajectory, cfg: &NonlinearityConfig) -> Result<(SourceTerm, f64), NonlinearError> {
    let h = evaluate_nonlinearity(tr, cfg)?;
    let n = norm_n(&h);
    Ok((h, n))
}
