//! Energy outside the light cone |x| ≥ |t| + R: the closed formula through
//! the light-cone transform, direct measurement on evolved states, and the
//! pointwise radiation asymptotics.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use serde::Serialize;

use field_core::{CauchyData, FieldError, ModeIndex, ModeState, Trajectory};
use lightcone_transform::{apply_T, apply_dsT, LightconeError, RadiationProfile};
use spectral_hankel::{free_propagate, transform_for};

#[derive(Debug, thiserror::Error)]
pub enum ExteriorError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Lightcone(#[from] LightconeError),
    #[error("cone base R must be non-negative, got {0}")]
    Radius(f64),
    #[error("radial grid ends at {extent} but t = {time} with R = {radius} needs coverage beyond {needed}")]
    Coverage { time: f64, radius: f64, extent: f64, needed: f64 },
    #[error("no trajectory node at t = {0}")]
    MissingTime(f64),
}

pub type Result<T> = std::result::Result<T, ExteriorError>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeEnergy {
    pub mode: ModeIndex,
    /// ‖∂_s T v_0‖² on s > R.
    pub field: f64,
    /// ‖T v_1‖² on s > R.
    pub velocity: f64,
}

impl ModeEnergy {
    pub fn total(&self) -> f64 {
        self.field + self.velocity
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasuredEnergy {
    pub time: f64,
    pub forward: f64,
    pub backward: f64,
    /// Half the sum of both directions.
    pub value: f64,
    pub per_mode: Vec<(ModeIndex, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExteriorEnergyReport {
    pub radius: f64,
    pub formula: Option<f64>,
    pub per_mode: Vec<ModeEnergy>,
    pub measured: Vec<MeasuredEnergy>,
    /// Limit estimate from the last two samples assuming a c/(t + R) remainder.
    pub extrapolated: Option<f64>,
    pub tolerance: f64,
}

impl ExteriorEnergyReport {
    fn new(radius: f64, tolerance: f64) -> Self {
        Self { radius, formula: None, per_mode: Vec::new(), measured: Vec::new(), extrapolated: None, tolerance }
    }

    /// The measured value at the largest sampled time.
    pub fn measured_last(&self) -> Option<f64> {
        self.measured.last().map(|m| m.value)
    }
}

/// Default absolute floor used when comparing energies against zero.
pub const ENERGY_TOL: f64 = 1e-8;

fn check_radius(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(ExteriorError::Radius(r))
    }
}

/// ‖∂_s T v_0‖²_{s>R} + ‖T v_1‖²_{s>R}, summed over modes.
pub fn exterior_energy_formula(state: &CauchyData, r: f64) -> Result<ExteriorEnergyReport> {
    check_radius(r)?;
    let mut report = ExteriorEnergyReport::new(r, ENERGY_TOL);
    for (mode, s) in &state.modes {
        let field = apply_dsT(&s.field)?.mode_norm_sq_beyond(mode, r);
        let velocity = apply_T(&s.velocity)?.mode_norm_sq_beyond(mode, r);
        report.per_mode.push(ModeEnergy { mode: *mode, field, velocity });
    }
    report.formula = Some(report.per_mode.iter().map(ModeEnergy::total).sum());
    Ok(report)
}

/// ∫_{r>a} (|∂_t u|² + |∂_r u|² + λ u²/r²) r^{d-1} dr for one mode, on cells centred beyond a.
pub fn mode_energy_beyond(s: &ModeState, a: f64) -> f64 {
    let grid = s.field.grid;
    let t = transform_for(&s.field.mode, grid);
    let w0 = t.inverse_w(&s.field.spectral);
    let dw0 = t.inverse_dw(&s.field.spectral);
    let w1 = t.inverse_w(&s.velocity.spectral);
    let p = s.field.mode.radial_weight_power();
    let lambda = s.field.mode.angular_eigenvalue();
    let h = grid.step();
    (grid.first_cell_beyond(a)..grid.cells())
        .map(|j| {
            let r = grid.r(j);
            let radial = dw0[j] - p * w0[j] / r;
            h * (w1[j] * w1[j] + radial * radial + lambda * w0[j] * w0[j] / (r * r))
        })
        .sum()
}

/// Per-mode energies outside radius a.
pub fn energy_beyond(state: &CauchyData, a: f64) -> BTreeMap<ModeIndex, f64> {
    state.modes.iter().map(|(m, s)| (*m, mode_energy_beyond(s, a))).collect()
}

fn check_coverage(state: &CauchyData, t: f64, r: f64) -> Result<()> {
    let extent = state.grid.extent();
    let needed = t.abs() + r;
    if needed >= extent {
        return Err(ExteriorError::Coverage { time: t, radius: r, extent, needed });
    }
    Ok(())
}

/// The same data with the velocity reversed, whose forward flow is the backward flow of `state`.
pub fn time_reversed(state: &CauchyData) -> CauchyData {
    let modes = state
        .modes
        .iter()
        .map(|(m, s)| (*m, ModeState { field: s.field.clone(), velocity: s.velocity.scaled(-1.0) }))
        .collect();
    CauchyData { dim: state.dim, grid: state.grid, modes }
}

fn extrapolate(report: &mut ExteriorEnergyReport) {
    let n = report.measured.len();
    if n < 2 {
        return;
    }
    let (a, b) = (&report.measured[n - 2], &report.measured[n - 1]);
    let (ta, tb) = (a.time.abs() + report.radius, b.time.abs() + report.radius);
    if tb > ta {
        report.extrapolated = Some(((tb * b.value - ta * a.value) / (tb - ta)).max(0.0));
    }
}

/// Measures the cone energy of the free evolution at each |t| in `times`, in both directions.
pub fn exterior_energy_measure(state: &CauchyData, r: f64, times: &[f64]) -> Result<ExteriorEnergyReport> {
    check_radius(r)?;
    let mut report = ExteriorEnergyReport::new(r, ENERGY_TOL);
    let reversed = time_reversed(state);
    for &t in times {
        check_coverage(state, t, r)?;
        let a = t.abs() + r;
        let fwd = energy_beyond(&free_propagate(state, t.abs()), a);
        let bwd = energy_beyond(&free_propagate(&reversed, t.abs()), a);
        report.measured.push(measured(t, &fwd, &bwd));
    }
    extrapolate(&mut report);
    Ok(report)
}

fn measured(t: f64, fwd: &BTreeMap<ModeIndex, f64>, bwd: &BTreeMap<ModeIndex, f64>) -> MeasuredEnergy {
    let per_mode: Vec<(ModeIndex, f64)> =
        fwd.iter().map(|(m, e)| (*m, 0.5 * (e + bwd.get(m).copied().unwrap_or(0.0)))).collect();
    let forward: f64 = fwd.values().sum();
    let backward: f64 = bwd.values().sum();
    MeasuredEnergy { time: t, forward, backward, value: 0.5 * (forward + backward), per_mode }
}

/// Cone energies on precomputed trajectories: `forward` holds u(t) and
/// `backward` holds u(-t) (both indexed by |t|).
pub fn exterior_energy_measure_trajectories(
    forward: &Trajectory,
    backward: &Trajectory,
    r: f64,
    times: &[f64],
) -> Result<ExteriorEnergyReport> {
    check_radius(r)?;
    let mut report = ExteriorEnergyReport::new(r, ENERGY_TOL);
    for &t in times {
        let f = node(forward, t.abs())?;
        let b = node(backward, t.abs())?;
        check_coverage(f, t, r)?;
        let a = t.abs() + r;
        report.measured.push(measured(t, &energy_beyond(f, a), &energy_beyond(b, a)));
    }
    extrapolate(&mut report);
    Ok(report)
}

fn node(tr: &Trajectory, t: f64) -> Result<&CauchyData> {
    if tr.is_empty() {
        return Err(FieldError::EmptyTrajectory.into());
    }
    let i = tr.nearest(t);
    if (tr.times[i] - t).abs() > 1e-9 * t.abs().max(1.0) {
        return Err(ExteriorError::MissingTime(t));
    }
    Ok(&tr.states[i])
}

/// L² distance on r ≥ t/2 between ∂_t u(t) and -(√2 r^{(d-1)/2})^{-1} F(r - t), summed over modes.
pub fn asymptotic_discrepancy(state_t: &CauchyData, f: &RadiationProfile, t: f64) -> Result<f64> {
    let grid = state_t.grid;
    grid.ensure_same(&f.grid)?;
    check_coverage(state_t, t, 0.0)?;
    let h = grid.step();
    let m = grid.cells() as f64;
    let zero = vec![0.0; 2 * grid.cells()];
    let mut acc = 0.0;
    let mut seen = std::collections::BTreeSet::new();
    for (mode, s) in &state_t.modes {
        seen.insert(*mode);
        let w1 = transform_for(mode, grid).inverse_w(&s.velocity.spectral);
        let g = f.modes.get(mode).unwrap_or(&zero);
        for (j, w) in w1.iter().enumerate().skip(grid.first_cell_beyond(0.5 * t)) {
            // s_i = (i + 1/2 - M) h, so r_j - t sits at fractional index (r_j - t)/h + M - 1/2.
            let x = (grid.r(j) - t) / h + m - 0.5;
            let target = -interpolate(g, x) / SQRT_2;
            acc += h * (w - target).powi(2);
        }
    }
    for (mode, g) in &f.modes {
        if seen.contains(mode) {
            continue;
        }
        for j in grid.first_cell_beyond(0.5 * t)..grid.cells() {
            let x = (grid.r(j) - t) / h + m - 0.5;
            acc += h * (interpolate(g, x) / SQRT_2).powi(2);
        }
    }
    Ok(acc.sqrt())
}

fn interpolate(g: &[f64], x: f64) -> f64 {
    if x < 0.0 || x > (g.len() - 1) as f64 {
        return 0.0;
    }
    let i = (x.floor() as usize).min(g.len() - 2);
    let frac = x - i as f64;
    (1.0 - frac) * g[i] + frac * g[i + 1]
}

/// [`asymptotic_discrepancy`] at the trajectory node t.
pub fn radiation_asymptotics_check(tr: &Trajectory, f: &RadiationProfile, t: f64) -> Result<f64> {
    asymptotic_discrepancy(node(tr, t)?, f, t)
}
