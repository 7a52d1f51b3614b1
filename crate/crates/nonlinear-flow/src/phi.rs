use serde::Serialize;

use duhamel_engine::NonradiativeSolution;
use exterior_energy::{exterior_energy_measure_trajectories, ExteriorEnergyReport};
use field_core::{CauchyData, Trajectory};
use plr_space::pi_r;
use spectral_hankel::free_propagate;

use crate::picard::{iterate, time_nodes, with_field_view};
use crate::{NonlinearError, NonlinearityConfig, PicardConfig, PicardReport};

/// Measured exterior energy must stay below this multiple of ‖data‖²_H, or the tail estimate.
pub const EXTERIOR_TOL: f64 = 1e-4;
/// ‖π_R Φ(data) - π_R data‖_H.
pub const PI_R_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct PhiResult {
    pub data: CauchyData,
    /// Φ(data) = (u, ∂_t u)(0).
    pub phi: CauchyData,
    /// The nonlinear solution on the window.
    pub trajectory: Trajectory,
    pub report: PicardReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiChecks {
    pub data_norm: f64,
    /// ‖Φ(data) - data‖_H.
    pub distance: f64,
    /// distance / ‖data‖_H^q.
    pub c_num: f64,
    pub pi_r_residual: f64,
    pub pi_r_ok: bool,
    pub exterior: ExteriorEnergyReport,
    pub exterior_bound: f64,
    pub exterior_ok: bool,
}

fn check_data(data: &CauchyData) -> Result<(), NonlinearError> {
    if !data.is_radial() {
        return Err(NonlinearError::NonRadial);
    }
    Ok(())
}

/// Φ(data): the fixed point u = u_L + T_R(f(u)) on [-T_w, T_w], evaluated at t = 0.
pub fn phi_map(
    data: &CauchyData,
    r: f64,
    nl: &NonlinearityConfig,
    cfg: &PicardConfig,
) -> Result<PhiResult, NonlinearError> {
    check_data(data)?;
    let times = time_nodes(-cfg.window, cfg.window, cfg.dt);
    let zero = times.partition_point(|&t| t < -0.5 * cfg.dt);
    let linear: Vec<CauchyData> = times.iter().map(|&t| with_field_view(free_propagate(data, t))).collect();
    let outcome = iterate(&times, &linear, nl, cfg, 0.0, |h| {
        let sol = NonradiativeSolution::solve_core(h, r)?;
        times.iter().map(|&t| Ok(sol.state_at(t)?)).collect()
    })?;
    let phi = data.combine(1.0, &outcome.r[zero], 1.0)?;
    Ok(PhiResult { data: data.clone(), phi, trajectory: Trajectory::new(times, outcome.u)?, report: outcome.report })
}

/// Properties (a)-(c) of a Φ evaluation; the exterior energy is measured at |t| in `times`.
pub fn phi_checks(res: &PhiResult, r: f64, q: f64, times: &[f64]) -> Result<PhiChecks, NonlinearError> {
    let data_norm = res.data.norm_h();
    let distance = res.phi.combine(1.0, &res.data, -1.0)?.norm_h();
    let c_num = if data_norm > 0.0 { distance / data_norm.powf(q) } else { 0.0 };
    let pi_r_residual = pi_r(&res.phi, r)?.combine(1.0, &pi_r(&res.data, r)?, -1.0)?.norm_h();
    let pick = |sign: f64| -> Result<Trajectory, NonlinearError> {
        let states = times.iter().map(|&t| res.trajectory.states[res.trajectory.nearest(sign * t)].clone()).collect();
        Ok(Trajectory::new(times.to_vec(), states)?)
    };
    let exterior = exterior_energy_measure_trajectories(&pick(1.0)?, &pick(-1.0)?, r, times)?;
    let exterior_bound = (EXTERIOR_TOL * data_norm * data_norm).max(res.report.tail_estimate);
    let exterior_ok = exterior.measured_last().is_some_and(|m| m <= exterior_bound);
    Ok(PhiChecks {
        data_norm,
        distance,
        c_num,
        pi_r_residual,
        pi_r_ok: pi_r_residual <= PI_R_TOL,
        exterior,
        exterior_bound,
        exterior_ok,
    })
}

/// Largest scale s of `direction` (within [lo, hi]) for which the Picard iteration converges, by bisection.
pub fn calibrate_epsilon(
    direction: &CauchyData,
    r: f64,
    nl: &NonlinearityConfig,
    cfg: &PicardConfig,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<f64, NonlinearError> {
    let unit = direction.scaled(1.0 / direction.norm_h());
    let converges = |s: f64| match phi_map(&unit.scaled(s), r, nl, cfg) {
        Ok(_) => Ok(true),
        Err(NonlinearError::Divergence(_) | NonlinearError::Hankel(_)) => Ok(false),
        Err(e) => Err(e),
    };
    if !converges(lo)? {
        return Ok(0.0);
    }
    if converges(hi)? {
        return Ok(hi);
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..steps {
        let m = (a * b).sqrt();
        if converges(m)? {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(a)
}
