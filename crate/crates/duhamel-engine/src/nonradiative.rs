use serde::Serialize;

use exterior_energy::{exterior_energy_measure_trajectories, ExteriorEnergyReport};
use field_core::{norm_n, norm_w, CauchyData, ModeIndex, ModeState, Slot, SourceTerm, Trajectory};
use lightcone_transform::{apply_T, apply_dsT, partial_inverse_g, RadiationProfile};
use plr_space::pi_r;
use spectral_hankel::{free_propagate, with_physical};

use crate::{DuhamelError, DuhamelSolution};

pub const RESIDUAL_TOL: f64 = 1e-3;
/// Scattering-state exterior energies must stay below this multiple of ‖h‖²_N.
pub const ENERGY_TOL: f64 = 1e-6;
/// Measured cone energy at the last time, relative to the scattering energy.
pub const MEASURE_TOL: f64 = 1e-2;
/// ‖π_R u(0)‖_H relative to ‖h‖_N.
pub const PROJECTION_TOL: f64 = 1e-8;
pub const LINEARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveConfig {
    /// |t| values at which the cone energy of u(±t) is measured; the last two feed the extrapolation.
    pub measure_times: Vec<f64>,
    /// X-norm window [-T, T].
    pub x_window: f64,
    pub x_step: f64,
    /// Re-solve with the source split in two and compare.
    pub check_linearity: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { measure_times: vec![10.0, 20.0], x_window: 20.0, x_step: 0.1, check_linearity: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonradiativeSolveReport {
    pub radius: f64,
    pub n_norm: f64,
    pub residual: f64,
    pub residual_ok: bool,
    /// ‖∂_s T S_0 - T S_1‖²_{s>R} for the forward scattering state S of u.
    pub forward_energy: f64,
    /// ‖∂_s T S_0 + T S_1‖²_{s>R} for the backward scattering state.
    pub backward_energy: f64,
    pub energy_bound: f64,
    pub energy_ok: bool,
    pub measured: ExteriorEnergyReport,
    /// ½(‖S_+‖²_H + ‖S_-‖²_H).
    pub scattering_energy: f64,
    pub measured_ok: bool,
    pub projection_norm: f64,
    pub projection_ok: bool,
    pub linearity_defect: Option<f64>,
    pub linearity_ok: bool,
    pub sup_h: f64,
    pub w_norm: Option<f64>,
    pub x_norm: f64,
    /// ‖u‖_X / ‖h‖_N on the window.
    pub x_constant: f64,
    pub passed: bool,
}

/// u = ũ - S_L(t) π_R ũ(0) with ũ(t) = v(t) + S_L(t) w.
#[derive(Debug, Clone)]
pub struct NonradiativeSolution {
    pub radius: f64,
    pub duhamel: DuhamelSolution,
    pub v_plus: CauchyData,
    /// (w_0, w_1).
    pub w: CauchyData,
    /// π_R ũ(0).
    pub correction: CauchyData,
    pub report: Option<NonradiativeSolveReport>,
}

fn half<'a>(g: &'a RadiationProfile, mode: &ModeIndex) -> &'a [f64] {
    g.modes.get(mode).map(Vec::as_slice).unwrap_or(&[])
}

/// Keeps cells with centres beyond R on the positive side of a·x + b·y.
fn positive_combination(
    x: &RadiationProfile,
    y: &RadiationProfile,
    mode: &ModeIndex,
    a: f64,
    b: f64,
    r: f64,
) -> RadiationProfile {
    let grid = x.grid;
    let m = grid.cells();
    let (gx, gy) = (half(x, mode), half(y, mode));
    let mut out = vec![0.0; 2 * m];
    for j in grid.first_cell_beyond(r)..m {
        let i = grid.s_index_of_r(j);
        out[i] = a * gx.get(i).copied().unwrap_or(0.0) + b * gy.get(i).copied().unwrap_or(0.0);
    }
    let mut p = RadiationProfile::empty(x.dim, grid);
    p.insert(*mode, out, 0.0);
    p
}

/// Exterior energies beyond R of S_L(t)·state as t → +∞ and t → -∞.
pub fn directional_energies(state: &CauchyData, r: f64) -> Result<(f64, f64), DuhamelError> {
    let grid = state.grid;
    let h = grid.step();
    let (mut fwd, mut bwd) = (0.0, 0.0);
    for (mode, s) in &state.modes {
        let a = apply_dsT(&s.field)?;
        let b = apply_T(&s.velocity)?;
        let (ga, gb) = (half(&a, mode), half(&b, mode));
        for j in grid.first_cell_beyond(r)..grid.cells() {
            let i = grid.s_index_of_r(j);
            fwd += h * (ga[i] - gb[i]).powi(2);
            bwd += h * (ga[i] + gb[i]).powi(2);
        }
    }
    Ok((fwd, bwd))
}

/// The w of the non-radiative solve: both scattering states of v + S_L w vanish beyond R on the light cone.
fn exterior_correction(v_plus: &CauchyData, r: f64) -> Result<CauchyData, DuhamelError> {
    let mut w = CauchyData::empty(v_plus.dim, v_plus.grid);
    for (mode, s) in &v_plus.modes {
        let a = apply_dsT(&s.field)?;
        let b = apply_T(&s.velocity)?;
        let w1 = partial_inverse_g(&positive_combination(&a, &b, mode, 0.5, -0.5, r), mode, Slot::Velocity, r)?;
        let w0 = partial_inverse_g(&positive_combination(&a, &b, mode, -0.5, 0.5, r), mode, Slot::Field, r)?;
        w.insert(ModeState { field: w0, velocity: w1 })?;
    }
    Ok(w)
}

impl NonradiativeSolution {
    /// The linear part of the solve: Duhamel integral, w and the π_R correction.
    pub fn solve_core(h: &SourceTerm, r: f64) -> Result<Self, DuhamelError> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(DuhamelError::Radius(r));
        }
        let duhamel = DuhamelSolution::new(h)?;
        let v_plus = duhamel.scattering_state();
        let w = exterior_correction(&v_plus, r)?;
        let tilde0 = duhamel.state_at(0.0).combine(1.0, &w, 1.0)?;
        let correction = pi_r(&tilde0, r)?;
        Ok(Self { radius: r, duhamel, v_plus, w, correction, report: None })
    }

    /// S_L(t)(w - π_R ũ(0)), the free part of u.
    fn free_part(&self) -> Result<CauchyData, DuhamelError> {
        Ok(self.w.combine(1.0, &self.correction, -1.0)?)
    }

    pub fn state_at(&self, t: f64) -> Result<CauchyData, DuhamelError> {
        Ok(self.duhamel.state_at(t).combine(1.0, &free_propagate(&self.free_part()?, t), 1.0)?)
    }

    pub fn initial_data(&self) -> Result<CauchyData, DuhamelError> {
        self.state_at(0.0)
    }

    /// Scattering state as t → +∞.
    pub fn forward_state(&self) -> Result<CauchyData, DuhamelError> {
        Ok(self.v_plus.combine(1.0, &self.free_part()?, 1.0)?)
    }

    /// Scattering state as t → -∞.
    pub fn backward_state(&self) -> Result<CauchyData, DuhamelError> {
        self.free_part()
    }

    /// u sampled on [a, b] with step dt.
    pub fn trajectory(&self, a: f64, b: f64, dt: f64) -> Result<Trajectory, DuhamelError> {
        let n = ((b - a) / dt).round() as usize;
        let times: Vec<f64> = (0..=n).map(|i| a + i as f64 * dt).collect();
        let states = times.iter().map(|&t| self.state_at(t)).collect::<Result<Vec<_>, _>>()?;
        Ok(Trajectory::new(times, states)?)
    }
}

/// Splits h at its middle node into two sources summing to h.
fn split_source(h: &SourceTerm) -> (SourceTerm, SourceTerm) {
    let k = h.times.len() / 2;
    let mut first = h.clone();
    let mut second = h.clone();
    for (i, (a, b)) in first.values.iter_mut().zip(second.values.iter_mut()).enumerate() {
        if i < k {
            b.clear();
        } else {
            a.clear();
        }
    }
    (first, second)
}

/// ‖u_{αh₁+βh₂}(0) - α u_{h₁}(0) - β u_{h₂}(0)‖_H relative to |α|‖u_{h₁}(0)‖ + |β|‖u_{h₂}(0)‖,
/// with the forward scattering states compared the same way.
pub fn linearity_defect(h1: &SourceTerm, h2: &SourceTerm, alpha: f64, beta: f64, r: f64) -> Result<f64, DuhamelError> {
    let s1 = NonradiativeSolution::solve_core(h1, r)?;
    let s2 = NonradiativeSolution::solve_core(h2, r)?;
    let s = NonradiativeSolution::solve_core(&h1.combine(alpha, h2, beta)?, r)?;
    let mut worst: f64 = 0.0;
    for pick in [NonradiativeSolution::initial_data, NonradiativeSolution::forward_state] {
        let (a, b, c) = (pick(&s1)?, pick(&s2)?, pick(&s)?);
        let diff = c.combine(1.0, &a.combine(alpha, &b, beta)?, -1.0)?.norm_h();
        let scale = alpha.abs() * a.norm_h() + beta.abs() * b.norm_h();
        if scale > 0.0 {
            worst = worst.max(diff / scale);
        } else {
            worst = worst.max(diff);
        }
    }
    Ok(worst)
}

/// The non-radiative solve with its postcondition report. Failing checks
/// are recorded in the report; use [`NonradiativeSolution::checked`] to turn them into an error.
pub fn nonradiative_source_solve(
    h: &SourceTerm,
    r: f64,
    cfg: &SolveConfig,
) -> Result<NonradiativeSolution, DuhamelError> {
    let mut sol = NonradiativeSolution::solve_core(h, r)?;
    let n_norm = norm_n(h);
    let residual = sol.duhamel.residual();

    let plus = sol.forward_state()?;
    let minus = sol.backward_state()?;
    let (forward_energy, _) = directional_energies(&plus, r)?;
    let (_, backward_energy) = directional_energies(&minus, r)?;
    let energy_bound = ENERGY_TOL * n_norm * n_norm;

    let fwd_states = cfg.measure_times.iter().map(|&t| sol.state_at(t)).collect::<Result<Vec<_>, _>>()?;
    let bwd_states = cfg.measure_times.iter().map(|&t| sol.state_at(-t)).collect::<Result<Vec<_>, _>>()?;
    let measured = exterior_energy_measure_trajectories(
        &Trajectory::new(cfg.measure_times.clone(), fwd_states)?,
        &Trajectory::new(cfg.measure_times.clone(), bwd_states)?,
        r,
        &cfg.measure_times,
    )?;
    let scattering_energy = 0.5 * (plus.norm_h().powi(2) + minus.norm_h().powi(2));
    let formula = 0.5 * (forward_energy + backward_energy);
    let measured_ok = measured
        .measured_last()
        .is_some_and(|m| (m - formula).abs() <= MEASURE_TOL * scattering_energy.max(f64::MIN_POSITIVE));

    let projection_norm = pi_r(&sol.initial_data()?, r)?.norm_h();

    let linearity_defect = if cfg.check_linearity && h.times.len() > 2 {
        let (h1, h2) = split_source(h);
        Some(linearity_defect(&h1, &h2, 1.0, 1.0, r)?)
    } else {
        None
    };

    let window = sol.trajectory(-cfg.x_window, cfg.x_window, cfg.x_step)?;
    let sup_h = window.states.iter().map(CauchyData::norm_h).fold(0.0, f64::max);
    let w_norm = if h.modes().iter().all(|m| m.l == 0) {
        let physical = Trajectory::new(window.times.clone(), window.states.iter().map(with_physical).collect())?;
        Some(norm_w(&physical)?)
    } else {
        None
    };
    let x_norm = sup_h + w_norm.unwrap_or(0.0);
    let x_constant = if n_norm > 0.0 { x_norm / n_norm } else { 0.0 };

    let residual_ok = residual <= RESIDUAL_TOL;
    let energy_ok = forward_energy <= energy_bound && backward_energy <= energy_bound;
    let projection_ok = projection_norm <= PROJECTION_TOL * n_norm;
    let linearity_ok = linearity_defect.is_none_or(|d| d <= LINEARITY_TOL);
    let passed = residual_ok && energy_ok && measured_ok && projection_ok && linearity_ok && x_norm.is_finite();
    sol.report = Some(NonradiativeSolveReport {
        radius: r,
        n_norm,
        residual,
        residual_ok,
        forward_energy,
        backward_energy,
        energy_bound,
        energy_ok,
        measured,
        scattering_energy,
        measured_ok,
        projection_norm,
        projection_ok,
        linearity_defect,
        linearity_ok,
        sup_h,
        w_norm,
        x_norm,
        x_constant,
        passed,
    });
    Ok(sol)
}

impl NonradiativeSolution {
    /// The solution if every postcondition held, the report otherwise.
    pub fn checked(self) -> Result<Self, DuhamelError> {
        match &self.report {
            Some(rep) if !rep.passed => Err(DuhamelError::Postcondition(Box::new(rep.clone()))),
            _ => Ok(self),
        }
    }
}
