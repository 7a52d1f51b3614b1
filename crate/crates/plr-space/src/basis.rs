use serde::Serialize;

use field_core::{Dimension, Grid, ModeIndex, RadialProfile, Slot};
use lightcone_transform::{invert_slot, PowerLawProfile, PowerPiece};

use crate::PlrError;

/// Exponents, admissible index sets and closed-form Gram matrices of the
/// power-law tails f_k (field slot) and g_k (velocity slot) for one degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlrBasisSpec {
    pub d: Dimension,
    pub l: u32,
    pub radius: f64,
    /// Indices k with α_k < 1 - d/2, spanning the field slot.
    pub k_h1: Vec<usize>,
    /// Indices k with α_k < -d/2, spanning the velocity slot.
    pub k_l2: Vec<usize>,
    pub gram_h1: Vec<Vec<f64>>,
    pub gram_l2: Vec<Vec<f64>>,
}

/// α_k = -l - d + 2k + 2.
pub fn alpha(d: Dimension, l: u32, k: usize) -> f64 {
    -f64::from(l) - d.as_f64() + 2.0 * k as f64 + 2.0
}

fn admissible(d: Dimension, l: u32, bound: f64) -> Vec<usize> {
    (0..).take_while(|&k| alpha(d, l, k) < bound).collect()
}

impl PlrBasisSpec {
    pub fn alpha(&self, k: usize) -> f64 {
        alpha(self.d, self.l, k)
    }

    pub fn mode(&self) -> ModeIndex {
        ModeIndex { d: self.d, l: self.l, m: 0 }
    }

    /// Indices spanning the given slot.
    pub fn indices(&self, slot: Slot) -> &[usize] {
        match slot {
            Slot::Field => &self.k_h1,
            Slot::Velocity => &self.k_l2,
        }
    }

    /// ⟨f_j, f_k⟩_{Ḣ¹} for f_k = (r/R)^{α_k} outside and (r/R)^l inside the ball.
    pub fn gram_h1_entry(&self, j: usize, k: usize) -> f64 {
        let (aj, ak) = (self.alpha(j), self.alpha(k));
        let d = self.d.as_f64();
        let l = f64::from(self.l);
        let lambda = l * (l + d - 2.0);
        let scale = self.radius.powf(d - 2.0);
        (aj * ak + lambda) * scale / -(aj + ak + d - 2.0) + l * scale
    }

    /// ⟨g_j, g_k⟩_{L²} for g_k = r^{α_k} 1_{r>R}.
    pub fn gram_l2_entry(&self, j: usize, k: usize) -> f64 {
        let s = self.alpha(j) + self.alpha(k) + self.d.as_f64();
        self.radius.powf(s) / -s
    }

    pub fn gram(&self, slot: Slot) -> &[Vec<f64>] {
        match slot {
            Slot::Field => &self.gram_h1,
            Slot::Velocity => &self.gram_l2,
        }
    }

    /// f_k or g_k as a power-law profile.
    pub fn member(&self, k: usize, slot: Slot, mode: ModeIndex) -> PowerLawProfile {
        let r = self.radius;
        let a = self.alpha(k);
        let outside = |coef| PowerPiece { start: r, end: f64::INFINITY, coef, exponent: a };
        let pieces = match slot {
            Slot::Field => vec![
                PowerPiece { start: 0.0, end: r, coef: r.powf(-f64::from(self.l)), exponent: f64::from(self.l) },
                outside(r.powf(-a)),
            ],
            Slot::Velocity => vec![outside(1.0)],
        };
        PowerLawProfile::new(mode, pieces)
    }

    /// Light-cone samples of a member: ∂_s T f_k (field) or T g_k (velocity).
    pub fn member_radiation(&self, k: usize, slot: Slot, mode: ModeIndex, grid: &Grid) -> Result<Vec<f64>, PlrError> {
        Ok(self.member(k, slot, mode).radiation_samples(grid, slot)?)
    }

    /// Spectral profile of a member, obtained by inverting its exact light-cone samples.
    pub fn materialize_member(&self, k: usize, slot: Slot, mode: ModeIndex, grid: Grid) -> Result<RadialProfile, PlrError> {
        if grid.extent() <= self.radius {
            return Err(PlrError::Extent { extent: grid.extent(), radius: self.radius });
        }
        let g = self.member_radiation(k, slot, mode, &grid)?;
        Ok(invert_slot(mode, grid, &g, slot)?)
    }
}

/// Admissible sets and Gram matrices for degree l in dimension d.
pub fn plr_basis(d: Dimension, l: u32, radius: f64) -> Result<PlrBasisSpec, PlrError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(PlrError::Radius(radius));
    }
    let half = d.as_f64() / 2.0;
    let mut spec = PlrBasisSpec {
        d,
        l,
        radius,
        k_h1: admissible(d, l, 1.0 - half),
        k_l2: admissible(d, l, -half),
        gram_h1: Vec::new(),
        gram_l2: Vec::new(),
    };
    spec.gram_h1 = spec.k_h1.iter().map(|&j| spec.k_h1.iter().map(|&k| spec.gram_h1_entry(j, k)).collect()).collect();
    spec.gram_l2 = spec.k_l2.iter().map(|&j| spec.k_l2.iter().map(|&k| spec.gram_l2_entry(j, k)).collect()).collect();
    Ok(spec)
}
