use std::collections::BTreeMap;

use crate::{Dimension, FieldError, Grid, ModeIndex, Slot};

/// One mode's radial coefficient.
///
/// The canonical data are the Fourier–Bessel samples
/// `B_k = ∫ w(r) ŝ_n(ρ_k r) dr` of `w = r^{(d-1)/2} v`, where ŝ_n is the
/// Riccati–Bessel function. The physical view holds `v(r_j)` when present.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub mode: ModeIndex,
    pub grid: Grid,
    pub spectral: Vec<f64>,
    pub physical: Option<Vec<f64>>,
}

impl RadialProfile {
    pub fn zeros(mode: ModeIndex, grid: Grid) -> Self {
        Self { mode, grid, spectral: vec![0.0; grid.cells()], physical: None }
    }

    pub fn from_spectral(mode: ModeIndex, grid: Grid, spectral: Vec<f64>) -> Result<Self, FieldError> {
        check_len(&grid, spectral.len())?;
        check_finite(&spectral, "spectral samples")?;
        Ok(Self { mode, grid, spectral, physical: None })
    }

    pub fn with_physical(mut self, physical: Vec<f64>) -> Result<Self, FieldError> {
        check_len(&self.grid, physical.len())?;
        check_finite(&physical, "physical samples")?;
        self.physical = Some(physical);
        Ok(self)
    }

    /// Squared L² norm of the mode coefficient, Σ (2/L) B_k².
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.spectral_weight() * self.spectral.iter().map(|b| b * b).sum::<f64>()
    }

    /// Squared Ḣ¹ seminorm, Σ (2/L) (ρ_k B_k)²; includes the angular term.
    pub fn h1_norm_sq(&self) -> f64 {
        let g = &self.grid;
        g.spectral_weight()
            * self
                .spectral
                .iter()
                .enumerate()
                .map(|(k, b)| (g.rho(k) * b).powi(2))
                .sum::<f64>()
    }

    pub fn norm_sq(&self, slot: Slot) -> f64 {
        match slot {
            Slot::Field => self.h1_norm_sq(),
            Slot::Velocity => self.l2_norm_sq(),
        }
    }

    pub fn inner(&self, other: &Self, slot: Slot) -> f64 {
        let g = &self.grid;
        let sum: f64 = match slot {
            Slot::Field => self
                .spectral
                .iter()
                .zip(&other.spectral)
                .enumerate()
                .map(|(k, (a, b))| g.rho(k).powi(2) * a * b)
                .sum(),
            Slot::Velocity => self.spectral.iter().zip(&other.spectral).map(|(a, b)| a * b).sum(),
        };
        g.spectral_weight() * sum
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            mode: self.mode,
            grid: self.grid,
            spectral: self.spectral.iter().map(|b| c * b).collect(),
            physical: self.physical.as_ref().map(|p| p.iter().map(|x| c * x).collect()),
        }
    }

    /// a·self + b·other on the spectral samples; the physical view is dropped.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            mode: self.mode,
            grid: self.grid,
            spectral: self.spectral.iter().zip(&other.spectral).map(|(x, y)| a * x + b * y).collect(),
            physical: None,
        }
    }
}

/// Both slots of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    pub field: RadialProfile,
    pub velocity: RadialProfile,
}

impl ModeState {
    pub fn zeros(mode: ModeIndex, grid: Grid) -> Self {
        Self { field: RadialProfile::zeros(mode, grid), velocity: RadialProfile::zeros(mode, grid) }
    }

    pub fn slot(&self, slot: Slot) -> &RadialProfile {
        match slot {
            Slot::Field => &self.field,
            Slot::Velocity => &self.velocity,
        }
    }

    pub fn energy(&self) -> f64 {
        self.field.h1_norm_sq() + self.velocity.l2_norm_sq()
    }
}

/// A Cauchy pair (u_0, u_1) ∈ Ḣ¹ × L² as a finite sum over modes.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub dim: Dimension,
    pub grid: Grid,
    pub modes: BTreeMap<ModeIndex, ModeState>,
}

impl CauchyData {
    pub fn empty(dim: Dimension, grid: Grid) -> Self {
        Self { dim, grid, modes: BTreeMap::new() }
    }

    pub fn single(field: RadialProfile, velocity: RadialProfile) -> Result<Self, FieldError> {
        field.grid.ensure_same(&velocity.grid)?;
        let mode = field.mode;
        let mut out = Self::empty(mode.d, field.grid);
        out.modes.insert(mode, ModeState { field, velocity });
        Ok(out)
    }

    pub fn insert(&mut self, state: ModeState) -> Result<(), FieldError> {
        let mode = state.field.mode;
        if mode.d != self.dim {
            return Err(FieldError::DimensionMismatch(mode.d.value(), self.dim.value()));
        }
        self.grid.ensure_same(&state.field.grid)?;
        self.grid.ensure_same(&state.velocity.grid)?;
        self.modes.insert(mode, state);
        Ok(())
    }

    pub fn mode(&self, mode: &ModeIndex) -> Option<&ModeState> {
        self.modes.get(mode)
    }

    pub fn norm_h(&self) -> f64 {
        h_inner(self, self).map(f64::sqrt).unwrap_or(f64::NAN)
    }

    /// a·self + b·other with zero padding over the union of modes.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self, FieldError> {
        self.check_compatible(other)?;
        let mut out = Self::empty(self.dim, self.grid);
        for mode in self.modes.keys().chain(other.modes.keys()) {
            if out.modes.contains_key(mode) {
                continue;
            }
            let zero = ModeState::zeros(*mode, self.grid);
            let x = self.modes.get(mode).unwrap_or(&zero);
            let y = other.modes.get(mode).unwrap_or(&zero);
            out.modes.insert(
                *mode,
                ModeState {
                    field: x.field.combine(a, &y.field, b),
                    velocity: x.velocity.combine(a, &y.velocity, b),
                },
            );
        }
        Ok(out)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let modes = self
            .modes
            .iter()
            .map(|(m, s)| (*m, ModeState { field: s.field.scaled(c), velocity: s.velocity.scaled(c) }))
            .collect();
        Self { dim: self.dim, grid: self.grid, modes }
    }

    pub fn check_compatible(&self, other: &Self) -> Result<(), FieldError> {
        if self.dim != other.dim {
            return Err(FieldError::DimensionMismatch(self.dim.value(), other.dim.value()));
        }
        self.grid.ensure_same(&other.grid)
    }

    pub fn is_radial(&self) -> bool {
        self.modes.keys().all(ModeIndex::is_radial)
    }
}

/// H inner product Σ_modes [⟨a_0, b_0⟩_{Ḣ¹} + ⟨a_1, b_1⟩_{L²}], evaluated spectrally.
pub fn h_inner(a: &CauchyData, b: &CauchyData) -> Result<f64, FieldError> {
    a.check_compatible(b)?;
    Ok(a
        .modes
        .iter()
        .filter_map(|(mode, x)| b.modes.get(mode).map(|y| (x, y)))
        .map(|(x, y)| x.field.inner(&y.field, Slot::Field) + x.velocity.inner(&y.velocity, Slot::Velocity))
        .sum())
}

/// Time-sampled states.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CauchyData>,
    pub window: (f64, f64),
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<CauchyData>) -> Result<Self, FieldError> {
        if times.is_empty() {
            return Err(FieldError::EmptyTrajectory);
        }
        if times.len() != states.len() {
            return Err(FieldError::Length { expected: times.len(), got: states.len() });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FieldError::TimeOrder);
        }
        let window = (times[0], times[times.len() - 1]);
        Ok(Self { times, states, window })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the node nearest to `t`.
    pub fn nearest(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, &ti) in self.times.iter().enumerate() {
            if (ti - t).abs() < (self.times[best] - t).abs() {
                best = i;
            }
        }
        best
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            times: self.times.clone(),
            states: self.states.iter().map(|s| s.scaled(c)).collect(),
            window: self.window,
        }
    }
}

/// A forcing term h(t) living in the L² slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceTerm {
    pub dim: Dimension,
    pub grid: Grid,
    pub times: Vec<f64>,
    pub values: Vec<BTreeMap<ModeIndex, RadialProfile>>,
    pub support: (f64, f64),
}

impl SourceTerm {
    pub fn new(
        dim: Dimension,
        grid: Grid,
        times: Vec<f64>,
        values: Vec<BTreeMap<ModeIndex, RadialProfile>>,
        support: (f64, f64),
    ) -> Result<Self, FieldError> {
        if times.len() != values.len() {
            return Err(FieldError::Length { expected: times.len(), got: values.len() });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FieldError::TimeOrder);
        }
        for slice in &values {
            for p in slice.values() {
                grid.ensure_same(&p.grid)?;
            }
        }
        Ok(Self { dim, grid, times, values, support })
    }

    pub fn zero(dim: Dimension, grid: Grid, times: Vec<f64>) -> Self {
        let n = times.len();
        let support = (times[0], times[n - 1]);
        Self { dim, grid, times, values: vec![BTreeMap::new(); n], support }
    }

    pub fn modes(&self) -> Vec<ModeIndex> {
        let mut out: Vec<ModeIndex> = self.values.iter().flat_map(|s| s.keys().copied()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Spectral samples of one mode at one time node, zero when absent.
    pub fn sample(&self, i: usize, mode: &ModeIndex) -> Option<&[f64]> {
        self.values[i].get(mode).map(|p| p.spectral.as_slice())
    }

    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self, FieldError> {
        self.grid.ensure_same(&other.grid)?;
        if self.times != other.times {
            return Err(FieldError::Grid("source time nodes differ".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| {
                let mut out = BTreeMap::new();
                for mode in x.keys().chain(y.keys()) {
                    let zero = RadialProfile::zeros(*mode, self.grid);
                    let p = x.get(mode).unwrap_or(&zero);
                    let q = y.get(mode).unwrap_or(&zero);
                    out.insert(*mode, p.combine(a, q, b));
                }
                out
            })
            .collect();
        let support = (self.support.0.min(other.support.0), self.support.1.max(other.support.1));
        Ok(Self { dim: self.dim, grid: self.grid, times: self.times.clone(), values, support })
    }
}

fn check_len(grid: &Grid, got: usize) -> Result<(), FieldError> {
    if got != grid.cells() {
        return Err(FieldError::Length { expected: grid.cells(), got });
    }
    Ok(())
}

fn check_finite(xs: &[f64], what: &str) -> Result<(), FieldError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(FieldError::NonFinite(what.into()))
    }
}
