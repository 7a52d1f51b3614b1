use crate::{CauchyData, FieldError, ModeIndex, SourceTerm, Trajectory};

/// Trapezoid rule on (possibly non-uniform) nodes.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// L^{p} norm of a radial state's field slot, from its physical view.
pub fn radial_lp_norm(state: &CauchyData, p: f64) -> Result<f64, FieldError> {
    if !state.is_radial() {
        return Err(FieldError::NonRadial);
    }
    let Some(ms) = state.modes.get(&ModeIndex::radial(state.dim)) else {
        return Ok(0.0);
    };
    let v = ms
        .field
        .physical
        .as_ref()
        .ok_or_else(|| FieldError::MissingPhysical("field slot".into()))?;
    let area = state.dim.sphere_area();
    let y0 = 1.0 / area.sqrt();
    let dm1 = state.dim.as_f64() - 1.0;
    let h = state.grid.step();
    let sum: f64 = v
        .iter()
        .enumerate()
        .map(|(j, x)| (x * y0).abs().powf(p) * state.grid.r(j).powf(dm1))
        .sum();
    Ok((area * h * sum).powf(1.0 / p))
}

/// W-norm (∫ ‖u(t)‖_{L^{2q}}^q dt)^{1/q}, q the critical exponent.
pub fn norm_w(tr: &Trajectory) -> Result<f64, FieldError> {
    let first = tr.states.first().ok_or(FieldError::EmptyTrajectory)?;
    let q = first.dim.critical_exponent();
    let vals = tr
        .states
        .iter()
        .map(|s| radial_lp_norm(s, 2.0 * q).map(|n| n.powf(q)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(trapezoid(&tr.times, &vals).powf(1.0 / q))
}

/// X-norm: sup over time of the H-norm plus the W-norm.
pub fn norm_x(tr: &Trajectory) -> Result<f64, FieldError> {
    let sup = tr.states.iter().map(CauchyData::norm_h).fold(0.0, f64::max);
    Ok(sup + norm_w(tr)?)
}

/// N-norm ∫ ‖h(t)‖_{L²} dt.
pub fn norm_n(src: &SourceTerm) -> f64 {
    let vals: Vec<f64> = src
        .values
        .iter()
        .map(|slice| slice.values().map(|p| p.l2_norm_sq()).sum::<f64>().sqrt())
        .collect();
    trapezoid(&src.times, &vals)
}
