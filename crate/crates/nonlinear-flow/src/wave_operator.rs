use serde::Serialize;

use duhamel_engine::DuhamelSolution;
use exterior_energy::radiation_asymptotics_check;
use field_core::{norm_w, CauchyData, FieldError, SourceTerm, Trajectory};
use lightcone_transform::{invert_radiation, RadiationProfile};
use spectral_hankel::free_propagate;

use crate::picard::{iterate, time_nodes, with_field_view};
use crate::{NonlinearError, NonlinearityConfig, PicardConfig, PicardReport};

#[derive(Debug, Clone)]
pub struct WaveOperatorResult {
    /// (v_0, v_1), the free data with radiation field F.
    pub scattering_data: CauchyData,
    pub start: f64,
    /// u on [T, T_max].
    pub trajectory: Trajectory,
    /// v_L on the same nodes.
    pub linear: Trajectory,
    pub report: PicardReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveOperatorChecks {
    pub times: Vec<f64>,
    /// ‖u(t) - v_L(t)‖_H.
    pub distances: Vec<f64>,
    pub distances_decreasing: bool,
    /// radiation_asymptotics_check(u, F, t).
    pub asymptotics: Vec<f64>,
    pub asymptotics_decreasing: bool,
}

/// w(t) = ∫_t^∞ sin((s-t)|D|)/|D| h(s) ds at each node, through the forward
/// Duhamel integral of the time-reversed source.
pub fn backward_duhamel(h: &SourceTerm) -> Result<Vec<CauchyData>, NonlinearError> {
    let times: Vec<f64> = h.times.iter().rev().map(|t| -t).collect();
    let values = h.values.iter().rev().cloned().collect();
    let support = (-h.support.1, -h.support.0);
    let reversed = SourceTerm::new(h.dim, h.grid, times, values, support)?;
    let sol = DuhamelSolution::new(&reversed)?;
    Ok(h.times
        .iter()
        .map(|&t| {
            let mut s = sol.state_at(-t);
            for m in s.modes.values_mut() {
                m.velocity = m.velocity.scaled(-1.0);
            }
            s
        })
        .collect())
}

fn is_decreasing(xs: &[f64], slack: f64) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack) + f64::MIN_POSITIVE)
}

/// The solution of the nonlinear equation scattering to the radiation field F:
/// u = v_L + w with w = Ψ(w) iterated on [T, T_max].
pub fn wave_operator(
    f: &RadiationProfile,
    start: f64,
    nl: &NonlinearityConfig,
    cfg: &PicardConfig,
) -> Result<WaveOperatorResult, NonlinearError> {
    if f.modes.keys().any(|m| m.l != 0) {
        return Err(NonlinearError::NonRadial);
    }
    let data = invert_radiation(f)?;
    let times = time_nodes(start, cfg.window, cfg.dt);
    let linear: Vec<CauchyData> = times.iter().map(|&t| with_field_view(free_propagate(&data, t))).collect();
    let outcome = iterate(&times, &linear, nl, cfg, start, backward_duhamel)?;
    Ok(WaveOperatorResult {
        scattering_data: data,
        start,
        trajectory: Trajectory::new(times.clone(), outcome.u)?,
        linear: Trajectory::new(times, linear)?,
        report: outcome.report,
    })
}

/// Smallest T on a grid of candidates `step` apart with ‖v_L‖_{W([T, T_max])} ≤ threshold.
pub fn find_start_time(
    f: &RadiationProfile,
    threshold: f64,
    cfg: &PicardConfig,
    step: f64,
) -> Result<Option<f64>, NonlinearError> {
    let data = invert_radiation(f)?;
    let times = time_nodes(0.0, cfg.window, cfg.dt);
    let linear: Vec<CauchyData> = times.iter().map(|&t| with_field_view(free_propagate(&data, t))).collect();
    let mut t0 = 0.0;
    while t0 < cfg.window {
        let i = times.partition_point(|&t| t < t0 - 1e-12);
        if times.len() - i < 2 {
            break;
        }
        let tr = Trajectory::new(times[i..].to_vec(), linear[i..].to_vec())?;
        if norm_w(&tr)? <= threshold {
            return Ok(Some(times[i]));
        }
        t0 += step;
    }
    Ok(None)
}

/// ‖u(t) - v_L(t)‖_H and the radiation discrepancy at each requested time.
pub fn wave_operator_checks(
    res: &WaveOperatorResult,
    f: &RadiationProfile,
    times: &[f64],
) -> Result<WaveOperatorChecks, NonlinearError> {
    let mut distances = Vec::new();
    let mut asymptotics = Vec::new();
    for &t in times {
        let i = res.trajectory.nearest(t);
        if (res.trajectory.times[i] - t).abs() > 1e-9 * t.abs().max(1.0) {
            return Err(FieldError::Grid(format!("time {t} is not a trajectory node")).into());
        }
        distances.push(res.trajectory.states[i].combine(1.0, &res.linear.states[i], -1.0)?.norm_h());
        asymptotics.push(radiation_asymptotics_check(&res.trajectory, f, t)?);
    }
    Ok(WaveOperatorChecks {
        times: times.to_vec(),
        distances_decreasing: is_decreasing(&distances, 1e-9),
        asymptotics_decreasing: is_decreasing(&asymptotics, 1e-9),
        distances,
        asymptotics,
    })
}
