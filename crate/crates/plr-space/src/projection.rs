use std::collections::BTreeMap;

use serde::Serialize;

use field_core::{CauchyData, Grid, ModeIndex, ModeState, RadialProfile, Slot};
use lightcone_transform::{apply_T, apply_dsT, invert_slot};

use crate::{plr_basis, PlrBasisSpec, PlrError};

/// Gram matrices worse than this are refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Relative exterior-energy threshold for membership.
pub const NONRADIATIVE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ModeCoefficients {
    /// (k, c_k) over f_k.
    pub field: Vec<(usize, f64)>,
    /// (k, c_k) over g_k.
    pub velocity: Vec<(usize, f64)>,
}

impl ModeCoefficients {
    pub fn slot(&self, slot: Slot) -> &[(usize, f64)] {
        match slot {
            Slot::Field => &self.field,
            Slot::Velocity => &self.velocity,
        }
    }
}

/// An element of P_L(R): tail coefficients per mode plus the compactly supported remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct PlrElement {
    pub radius: f64,
    pub coefficients: BTreeMap<ModeIndex, ModeCoefficients>,
    pub compact: CauchyData,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonradiativeReport {
    pub radius: f64,
    pub exterior_energy: f64,
    pub norm_sq: f64,
    /// ‖state - π_R state‖_H.
    pub projection_residual: f64,
    pub tolerance: f64,
    pub member: bool,
}

fn slot_radiation(p: &RadialProfile, slot: Slot) -> Result<Vec<f64>, PlrError> {
    let f = match slot {
        Slot::Field => apply_dsT(p)?,
        Slot::Velocity => apply_T(p)?,
    };
    Ok(f.modes.into_values().next().unwrap_or_default())
}

/// Zeroes samples on cells centred beyond |s| = R.
fn truncate(g: &mut [f64], grid: &Grid, r: f64) {
    let m = grid.cells();
    for j in grid.first_cell_beyond(r)..m {
        g[grid.s_index_of_r(j)] = 0.0;
        g[grid.s_index_of_neg_r(j)] = 0.0;
    }
}

fn dot(a: &[f64], b: &[f64], h: f64) -> f64 {
    h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

/// Solves the small SPD system by Cholesky, refusing ill-conditioned matrices.
fn spd_solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>, PlrError> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= 0.0 {
                    return Err(PlrError::Conditioning(f64::INFINITY));
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| l[i][i]).collect();
    if n > 0 {
        let hi = diag.iter().copied().fold(0.0, f64::max);
        let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let cond = (hi / lo).powi(2);
        if cond > MAX_CONDITION {
            return Err(PlrError::Conditioning(cond));
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    Ok(x)
}

struct SlotProjection {
    coefficients: Vec<(usize, f64)>,
    /// Light-cone samples of the compact remainder.
    compact: Vec<f64>,
}

fn project_slot(
    spec: &PlrBasisSpec,
    mode: ModeIndex,
    grid: &Grid,
    mut g: Vec<f64>,
    slot: Slot,
) -> Result<SlotProjection, PlrError> {
    truncate(&mut g, grid, spec.radius);
    let h = grid.step();
    let ks = spec.indices(slot);
    let basis: Vec<Vec<f64>> =
        ks.iter().map(|&k| spec.member_radiation(k, slot, mode, grid)).collect::<Result<_, _>>()?;
    let gram: Vec<Vec<f64>> = basis.iter().map(|a| basis.iter().map(|b| dot(a, b, h)).collect()).collect();
    let rhs: Vec<f64> = basis.iter().map(|b| dot(&g, b, h)).collect();
    let c = spd_solve(&gram, &rhs)?;
    for (ck, b) in c.iter().zip(&basis) {
        g.iter_mut().zip(b).for_each(|(x, y)| *x -= ck * y);
    }
    Ok(SlotProjection { coefficients: ks.iter().copied().zip(c).collect(), compact: g })
}

fn check_radius(r: f64) -> Result<(), PlrError> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(PlrError::Radius(r))
    }
}

/// The H-orthogonal projection onto P_L(R), decomposed into tails and a compact part.
pub fn project_pr(state: &CauchyData, r: f64) -> Result<PlrElement, PlrError> {
    check_radius(r)?;
    let grid = state.grid;
    let mut coefficients = BTreeMap::new();
    let mut compact = CauchyData::empty(state.dim, grid);
    for (mode, s) in &state.modes {
        let spec = plr_basis(mode.d, mode.l, r)?;
        let f = project_slot(&spec, *mode, &grid, slot_radiation(&s.field, Slot::Field)?, Slot::Field)?;
        let v = project_slot(&spec, *mode, &grid, slot_radiation(&s.velocity, Slot::Velocity)?, Slot::Velocity)?;
        coefficients.insert(*mode, ModeCoefficients { field: f.coefficients, velocity: v.coefficients });
        compact.insert(ModeState {
            field: invert_slot(*mode, grid, &f.compact, Slot::Field)?,
            velocity: invert_slot(*mode, grid, &v.compact, Slot::Velocity)?,
        })?;
    }
    Ok(PlrElement { radius: r, coefficients, compact })
}

/// π_R(state) as Cauchy data, by truncating both light-cone profiles to [-R, R].
pub fn pi_r(state: &CauchyData, r: f64) -> Result<CauchyData, PlrError> {
    check_radius(r)?;
    let grid = state.grid;
    let mut out = CauchyData::empty(state.dim, grid);
    for (mode, s) in &state.modes {
        let mut g0 = slot_radiation(&s.field, Slot::Field)?;
        let mut g1 = slot_radiation(&s.velocity, Slot::Velocity)?;
        truncate(&mut g0, &grid, r);
        truncate(&mut g1, &grid, r);
        out.insert(ModeState {
            field: invert_slot(*mode, grid, &g0, Slot::Field)?,
            velocity: invert_slot(*mode, grid, &g1, Slot::Velocity)?,
        })?;
    }
    Ok(out)
}

impl PlrElement {
    /// The zero element on the given modes.
    pub fn zero(state_like: &CauchyData, radius: f64) -> Self {
        Self {
            radius,
            coefficients: state_like.modes.keys().map(|m| (*m, ModeCoefficients::default())).collect(),
            compact: CauchyData::empty(state_like.dim, state_like.grid),
        }
    }
}

/// Σ c_k (f_k, g_k) + compact part, on the compact part's grid.
pub fn materialize(e: &PlrElement) -> Result<CauchyData, PlrError> {
    let grid = e.compact.grid;
    let mut out = e.compact.clone();
    for (mode, coefs) in &e.coefficients {
        let spec = plr_basis(mode.d, mode.l, e.radius)?;
        let mut tails = ModeState::zeros(*mode, grid);
        for slot in [Slot::Field, Slot::Velocity] {
            for &(k, c) in coefs.slot(slot) {
                let member = spec.materialize_member(k, slot, *mode, grid)?;
                let target = match slot {
                    Slot::Field => &mut tails.field,
                    Slot::Velocity => &mut tails.velocity,
                };
                *target = target.combine(1.0, &member, c);
            }
        }
        let mut single = CauchyData::empty(out.dim, grid);
        single.insert(tails)?;
        out = out.combine(1.0, &single, 1.0)?;
    }
    Ok(out)
}

/// Membership in P_L(R) by the exterior-energy formula, with the projection residual as a second witness.
pub fn is_nonradiative_linear(state: &CauchyData, r: f64) -> Result<NonradiativeReport, PlrError> {
    let energy = exterior_energy::exterior_energy_formula(state, r)?.formula.unwrap_or(0.0);
    let norm_sq = state.norm_h().powi(2);
    let residual = state.combine(1.0, &pi_r(state, r)?, -1.0)?.norm_h();
    Ok(NonradiativeReport {
        radius: r,
        exterior_energy: energy,
        norm_sq,
        projection_residual: residual,
        tolerance: NONRADIATIVE_TOL,
        member: energy <= NONRADIATIVE_TOL * norm_sq.max(f64::MIN_POSITIVE),
    })
}
