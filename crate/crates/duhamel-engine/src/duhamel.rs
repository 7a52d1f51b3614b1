use std::collections::BTreeMap;

use field_core::{CauchyData, ModeIndex, ModeState, RadialProfile, SourceTerm, Trajectory};
use spectral_hankel::free_propagate;

use crate::filon::{oscillatory_integral, step};
use crate::DuhamelError;

/// Relative size below which a source sample counts as zero outside the declared support.
const SUPPORT_TOL: f64 = 1e-14;

/// (v̂, ∂_t v̂) per mode.
type Spectra = BTreeMap<ModeIndex, (Vec<f64>, Vec<f64>)>;

/// The forward scattering state of the backward Duhamel integral and its remainder.
#[derive(Debug, Clone)]
pub struct ScatteringDecomposition {
    /// Ḣ¹ and L² slots of (v_{0+}, v_{1+}).
    pub v_plus: CauchyData,
    /// r(t) = v(t) - S_L(t) v_+ at the source nodes.
    pub remainder: Trajectory,
}

impl ScatteringDecomposition {
    pub fn v0_plus(&self) -> impl Iterator<Item = &RadialProfile> {
        self.v_plus.modes.values().map(|s| &s.field)
    }

    pub fn v1_plus(&self) -> impl Iterator<Item = &RadialProfile> {
        self.v_plus.modes.values().map(|s| &s.velocity)
    }
}

/// v(t) = ∫_{-∞}^t sin((t-τ)|D|)/|D| h(τ) dτ, stored at the source nodes and
/// evaluable at any time. The source is read as piecewise linear in time
/// between nodes and zero outside them.
#[derive(Debug, Clone)]
pub struct DuhamelSolution {
    source: SourceTerm,
    modes: Vec<ModeIndex>,
    nodes: Vec<Spectra>,
}

fn validate(h: &SourceTerm) -> Result<(), DuhamelError> {
    let (a, b) = h.support;
    let (first, last) = (h.times[0], h.times[h.times.len() - 1]);
    if !(a.is_finite() && b.is_finite()) || a > b || a < first || b > last {
        return Err(DuhamelError::UnboundedSupport { support: h.support, nodes: (first, last) });
    }
    let scale = h.values.iter().flat_map(|s| s.values()).map(|p| p.l2_norm_sq()).fold(0.0, f64::max);
    for (t, slice) in h.times.iter().zip(&h.values) {
        if *t >= a && *t <= b {
            continue;
        }
        let mass: f64 = slice.values().map(|p| p.l2_norm_sq()).sum();
        if mass > SUPPORT_TOL * SUPPORT_TOL * scale {
            return Err(DuhamelError::UnboundedSupport { support: h.support, nodes: (first, last) });
        }
    }
    Ok(())
}

fn sample<'a>(h: &'a SourceTerm, i: usize, mode: &ModeIndex, zeros: &'a [f64]) -> &'a [f64] {
    h.sample(i, mode).unwrap_or(zeros)
}

impl DuhamelSolution {
    pub fn new(h: &SourceTerm) -> Result<Self, DuhamelError> {
        validate(h)?;
        let grid = h.grid;
        let m = grid.cells();
        let modes = h.modes();
        let zeros = vec![0.0; m];
        let mut current: Spectra = modes.iter().map(|md| (*md, (vec![0.0; m], vec![0.0; m]))).collect();
        let mut nodes = vec![current.clone()];
        for i in 1..h.times.len() {
            let dt = h.times[i] - h.times[i - 1];
            for (mode, (b0, b1)) in current.iter_mut() {
                let (h0, h1) = (sample(h, i - 1, mode, &zeros), sample(h, i, mode, &zeros));
                for k in 0..m {
                    (b0[k], b1[k]) = step(grid.rho(k), dt, b0[k], b1[k], h0[k], h1[k]);
                }
            }
            nodes.push(current.clone());
        }
        Ok(Self { source: h.clone(), modes, nodes })
    }

    pub fn source(&self) -> &SourceTerm {
        &self.source
    }

    fn to_state(&self, spectra: &Spectra) -> CauchyData {
        let grid = self.source.grid;
        let mut out = CauchyData::empty(self.source.dim, grid);
        for (mode, (b0, b1)) in spectra {
            let field = RadialProfile { mode: *mode, grid, spectral: b0.clone(), physical: None };
            let velocity = RadialProfile { mode: *mode, grid, spectral: b1.clone(), physical: None };
            out.modes.insert(*mode, ModeState { field, velocity });
        }
        out
    }

    pub fn zero_state(&self) -> CauchyData {
        let grid = self.source.grid;
        let mut out = CauchyData::empty(self.source.dim, grid);
        for mode in &self.modes {
            out.modes.insert(*mode, ModeState::zeros(*mode, grid));
        }
        out
    }

    /// v(t): exactly zero before the first node, free evolution after the last.
    pub fn state_at(&self, t: f64) -> CauchyData {
        let times = &self.source.times;
        let n = times.len();
        if t <= times[0] {
            return self.zero_state();
        }
        if t >= times[n - 1] {
            return free_propagate(&self.to_state(&self.nodes[n - 1]), t - times[n - 1]);
        }
        let i = times.partition_point(|&x| x <= t) - 1;
        let dt = t - times[i];
        if dt == 0.0 {
            return self.to_state(&self.nodes[i]);
        }
        let theta = dt / (times[i + 1] - times[i]);
        let grid = self.source.grid;
        let zeros = vec![0.0; grid.cells()];
        let spectra = self.nodes[i]
            .iter()
            .map(|(mode, (b0, b1))| {
                let h0 = sample(&self.source, i, mode, &zeros);
                let h1 = sample(&self.source, i + 1, mode, &zeros);
                let (c0, c1): (Vec<f64>, Vec<f64>) = (0..grid.cells())
                    .map(|k| {
                        let hk = (1.0 - theta) * h0[k] + theta * h1[k];
                        step(grid.rho(k), dt, b0[k], b1[k], h0[k], hk)
                    })
                    .unzip();
                (*mode, (c0, c1))
            })
            .collect();
        self.to_state(&spectra)
    }

    /// v at the source nodes.
    pub fn trajectory(&self) -> Trajectory {
        let states = self.nodes.iter().map(|s| self.to_state(s)).collect();
        Trajectory::new(self.source.times.clone(), states).expect("source nodes are strictly increasing")
    }

    /// v_{0+} = -∫ sin(τ|D|)/|D| h dτ and v_{1+} = ∫ cos(τ|D|) h dτ, integrated directly.
    pub fn scattering_state(&self) -> CauchyData {
        let h = &self.source;
        let grid = h.grid;
        let m = grid.cells();
        let zeros = vec![0.0; m];
        let spectra = self
            .modes
            .iter()
            .map(|mode| {
                let mut b0 = vec![0.0; m];
                let mut b1 = vec![0.0; m];
                for i in 1..h.times.len() {
                    let (t0, dt) = (h.times[i - 1], h.times[i] - h.times[i - 1]);
                    let (h0, h1) = (sample(h, i - 1, mode, &zeros), sample(h, i, mode, &zeros));
                    for k in 0..m {
                        if h0[k] == 0.0 && h1[k] == 0.0 {
                            continue;
                        }
                        let rho = grid.rho(k);
                        let (re, im) = oscillatory_integral(rho, t0, dt, h0[k], h1[k]);
                        b0[k] -= im / rho;
                        b1[k] += re;
                    }
                }
                (*mode, (b0, b1))
            })
            .collect();
        self.to_state(&spectra)
    }

    pub fn scattering(&self) -> Result<ScatteringDecomposition, DuhamelError> {
        let v_plus = self.scattering_state();
        let times = self.source.times.clone();
        let states = times
            .iter()
            .zip(&self.nodes)
            .map(|(t, s)| self.to_state(s).combine(1.0, &free_propagate(&v_plus, *t), -1.0))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ScatteringDecomposition { v_plus, remainder: Trajectory::new(times, states)? })
    }

    /// max over interval midpoints of ‖∂_t² v + |D|² v - h‖_{L²} / max_t ‖h(t)‖_{L²},
    /// with a five-point stencil inside each interval.
    pub fn residual(&self) -> f64 {
        let h = &self.source;
        let grid = h.grid;
        let m = grid.cells();
        let zeros = vec![0.0; m];
        let scale = h
            .values
            .iter()
            .map(|s| s.values().map(|p| p.l2_norm_sq()).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let weight = grid.spectral_weight();
        let mut worst: f64 = 0.0;
        for i in 0..h.times.len() - 1 {
            let (t0, t1) = (h.times[i], h.times[i + 1]);
            let mid = 0.5 * (t0 + t1);
            let delta = (t1 - t0) / 8.0;
            let samples: Vec<CauchyData> = (-2..=2).map(|j| self.state_at(mid + f64::from(j) * delta)).collect();
            let mut sq = 0.0;
            for mode in &self.modes {
                let (h0, h1) = (sample(h, i, mode, &zeros), sample(h, i + 1, mode, &zeros));
                let b = |j: usize| &samples[j].modes[mode].field.spectral;
                for k in 0..m {
                    let vtt = (-b(0)[k] + 16.0 * b(1)[k] - 30.0 * b(2)[k] + 16.0 * b(3)[k] - b(4)[k])
                        / (12.0 * delta * delta);
                    let rho = grid.rho(k);
                    let r = vtt + rho * rho * b(2)[k] - 0.5 * (h0[k] + h1[k]);
                    sq += r * r;
                }
            }
            worst = worst.max((weight * sq).sqrt());
        }
        worst / scale
    }
}

/// v(t) at the source nodes.
pub fn duhamel_from_minus_infinity(h: &SourceTerm) -> Result<Trajectory, DuhamelError> {
    Ok(DuhamelSolution::new(h)?.trajectory())
}

pub fn extract_scattering(h: &SourceTerm) -> Result<ScatteringDecomposition, DuhamelError> {
    DuhamelSolution::new(h)?.scattering()
}
