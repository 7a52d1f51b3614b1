use serde::Serialize;

use field_core::{norm_w, CauchyData, SourceTerm, Trajectory};
use spectral_hankel::hankel_inverse;

use crate::{nonlinearity_with_norm, NonlinearError, NonlinearityConfig};

/// Time window, step and stopping rule of a Picard iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardConfig {
    /// Half-width T_w of the symmetric window used by Φ, or the end time used by the wave operator.
    pub window: f64,
    pub dt: f64,
    /// Stop when the X-difference falls below tol·‖r‖_X.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self { window: 40.0, dt: 0.05, tol: 1e-12, max_iter: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardReport {
    pub iterations: usize,
    /// ‖r_k - r_{k-1}‖_X per iteration.
    pub differences: Vec<f64>,
    /// Successive difference ratios.
    pub ratios: Vec<f64>,
    pub final_residual: f64,
    pub window: (f64, f64),
    /// N-norm estimate of f(u) on the discarded times.
    pub tail_estimate: f64,
    /// ‖u_L‖_W on the window.
    pub linear_w_norm: f64,
    /// ratio / (‖u_L‖_W^{q-1} + ‖r‖_X^{q-1}) for the last ratio.
    pub kappa: Option<f64>,
    pub converged: bool,
}

impl PicardReport {
    pub fn last_ratio(&self) -> Option<f64> {
        self.ratios.last().copied()
    }

    /// (iteration, X-difference, ratio) rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,x_difference,ratio\n");
        for (i, d) in self.differences.iter().enumerate() {
            let ratio = if i == 0 { String::new() } else { format!("{:e}", self.ratios[i - 1]) };
            out.push_str(&format!("{},{:e},{}\n", i + 1, d, ratio));
        }
        out
    }
}

pub(crate) fn time_nodes(a: f64, b: f64, dt: f64) -> Vec<f64> {
    let n = ((b - a) / dt).round() as usize;
    (0..=n).map(|i| a + i as f64 * dt).collect()
}

/// Attaches the physical view of the field slot only.
pub(crate) fn with_field_view(state: CauchyData) -> CauchyData {
    let mut state = state;
    for s in state.modes.values_mut() {
        s.field = hankel_inverse(&s.field);
    }
    state
}

/// a·x + b·y keeping the field-slot physical views.
pub(crate) fn combine_viewed(x: &CauchyData, a: f64, y: &CauchyData, b: f64) -> Result<CauchyData, NonlinearError> {
    let mut out = x.combine(a, y, b)?;
    for (mode, s) in out.modes.iter_mut() {
        let px = x.modes.get(mode).and_then(|m| m.field.physical.as_ref());
        let py = y.modes.get(mode).and_then(|m| m.field.physical.as_ref());
        let n = x.grid.cells();
        let zero = vec![0.0; n];
        let (px, py) = match (px, py) {
            (None, None) => continue,
            (px, py) => (px.unwrap_or(&zero), py.unwrap_or(&zero)),
        };
        s.field.physical = Some(px.iter().zip(py).map(|(u, v)| a * u + b * v).collect());
    }
    Ok(out)
}

fn x_norm(times: &[f64], states: Vec<CauchyData>) -> Result<f64, NonlinearError> {
    let sup = states.iter().map(CauchyData::norm_h).fold(0.0, f64::max);
    let tr = Trajectory::new(times.to_vec(), states)?;
    Ok(sup + norm_w(&tr)?)
}

/// ‖f(u)‖_{L²} extrapolated past both window ends by a power-law fit through
/// the values at half the window and at its end.
fn tail_estimate(times: &[f64], slice_norms: &[f64], anchor: f64) -> f64 {
    let n = times.len();
    let fit = |far: usize, mid: usize| -> f64 {
        let (t1, t2) = ((times[mid] - anchor).abs(), (times[far] - anchor).abs());
        let (g1, g2) = (slice_norms[mid], slice_norms[far]);
        if g2 == 0.0 {
            return 0.0;
        }
        if g1 <= g2 || t1 <= 0.0 {
            return f64::INFINITY;
        }
        let p = (g1 / g2).ln() / (t2 / t1).ln();
        if p <= 1.0 {
            f64::INFINITY
        } else {
            g2 * t2 / (p - 1.0)
        }
    };
    let mid_hi = times.partition_point(|&t| t < 0.5 * (anchor + times[n - 1]));
    let hi = fit(n - 1, mid_hi.min(n - 1));
    let lo = if times[0] < anchor {
        let mid_lo = times.partition_point(|&t| t < 0.5 * (anchor + times[0]));
        fit(0, mid_lo)
    } else {
        0.0
    };
    hi + lo
}

pub(crate) struct PicardOutcome {
    /// u = u_L + r on the window, with field-slot physical views.
    pub u: Vec<CauchyData>,
    pub r: Vec<CauchyData>,
    pub report: PicardReport,
}

/// Iterates r ↦ solve(f(u_L + r)) from r = 0. `linear` carries field-slot physical views.
pub(crate) fn iterate(
    times: &[f64],
    linear: &[CauchyData],
    nl: &NonlinearityConfig,
    cfg: &PicardConfig,
    anchor: f64,
    solve: impl Fn(&SourceTerm) -> Result<Vec<CauchyData>, NonlinearError>,
) -> Result<PicardOutcome, NonlinearError> {
    let linear_w_norm = norm_w(&Trajectory::new(times.to_vec(), linear.to_vec())?)?;
    let mut r: Vec<CauchyData> = linear.iter().map(|s| s.scaled(0.0)).collect();
    let mut u = linear.to_vec();
    let mut differences = Vec::new();
    let mut ratios = Vec::new();
    let mut converged = false;
    let mut tail = 0.0;
    let mut r_norm = 0.0;
    for _ in 0..cfg.max_iter {
        let tr = Trajectory::new(times.to_vec(), u.clone())?;
        let (h, _) = nonlinearity_with_norm(&tr, nl)?;
        let slice_norms: Vec<f64> =
            h.values.iter().map(|s| s.values().map(|p| p.l2_norm_sq()).sum::<f64>().sqrt()).collect();
        tail = tail_estimate(times, &slice_norms, anchor);
        let next: Vec<CauchyData> = solve(&h)?.into_iter().map(with_field_view).collect();
        let diff_states = next.iter().zip(&r).map(|(a, b)| combine_viewed(a, 1.0, b, -1.0)).collect::<Result<Vec<_>, _>>()?;
        let diff = x_norm(times, diff_states)?;
        r_norm = x_norm(times, next.clone())?;
        if let Some(prev) = differences.last().copied() {
            ratios.push(if prev > 0.0 { diff / prev } else { 0.0 });
        }
        differences.push(diff);
        u = linear.iter().zip(&next).map(|(a, b)| combine_viewed(a, 1.0, b, 1.0)).collect::<Result<Vec<_>, _>>()?;
        r = next;
        if !(diff.is_finite() && r_norm.is_finite()) {
            break;
        }
        if diff <= cfg.tol * r_norm || diff == 0.0 {
            converged = true;
            break;
        }
        if ratios.len() >= 2 && ratios.iter().rev().take(2).all(|&q| q >= 1.0) {
            break;
        }
    }
    let q = nl.q;
    let kappa = ratios.last().map(|rat| rat / (linear_w_norm.powf(q - 1.0) + r_norm.powf(q - 1.0)));
    let report = PicardReport {
        iterations: differences.len(),
        final_residual: differences.last().copied().unwrap_or(0.0),
        differences,
        ratios,
        window: (times[0], times[times.len() - 1]),
        tail_estimate: tail,
        linear_w_norm,
        kappa,
        converged,
    };
    if !converged {
        return Err(NonlinearError::Divergence(Box::new(report)));
    }
    Ok(PicardOutcome { u, r, report })
}
