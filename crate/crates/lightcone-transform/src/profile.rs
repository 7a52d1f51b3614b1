use std::collections::BTreeMap;

use field_core::{Container, Dimension, FieldError, Grid, ModeIndex};

/// Per-mode light-cone profiles G_ℓ(s) on the symmetric 2M-point grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationProfile {
    pub dim: Dimension,
    pub grid: Grid,
    pub modes: BTreeMap<ModeIndex, Vec<f64>>,
    /// Declared parity per mode: +1 even, -1 odd, 0 none.
    pub parity: BTreeMap<ModeIndex, f64>,
}

impl RadiationProfile {
    pub fn empty(dim: Dimension, grid: Grid) -> Self {
        Self { dim, grid, modes: BTreeMap::new(), parity: BTreeMap::new() }
    }

    pub fn insert(&mut self, mode: ModeIndex, samples: Vec<f64>, parity: f64) {
        self.modes.insert(mode, samples);
        self.parity.insert(mode, parity);
    }

    /// ∫ |G|² ds summed over modes.
    pub fn norm_sq(&self) -> f64 {
        let h = self.grid.step();
        self.modes.values().flatten().map(|g| h * g * g).sum()
    }

    /// ∫_{s > r} |G|² ds summed over modes, on cells whose centres exceed r.
    pub fn norm_sq_beyond(&self, r: f64) -> f64 {
        self.modes.keys().map(|m| self.mode_norm_sq_beyond(m, r)).sum()
    }

    pub fn mode_norm_sq_beyond(&self, mode: &ModeIndex, r: f64) -> f64 {
        let h = self.grid.step();
        let m = self.grid.cells();
        let start = m + self.grid.first_cell_beyond(r);
        self.modes.get(mode).map_or(0.0, |g| g[start..].iter().map(|x| h * x * x).sum())
    }

    /// Largest violation of G(-s) = ε G(s) for the declared parities.
    pub fn parity_defect(&self) -> f64 {
        let m = self.grid.cells();
        self.modes
            .iter()
            .map(|(mode, g)| {
                let eps = self.parity.get(mode).copied().unwrap_or(0.0);
                if eps == 0.0 {
                    return 0.0;
                }
                (0..m).map(|j| (g[m - 1 - j] - eps * g[m + j]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self, FieldError> {
        self.grid.ensure_same(&other.grid)?;
        let mut out = Self::empty(self.dim, self.grid);
        let zero = vec![0.0; 2 * self.grid.cells()];
        for mode in self.modes.keys().chain(other.modes.keys()) {
            let x = self.modes.get(mode).unwrap_or(&zero);
            let y = other.modes.get(mode).unwrap_or(&zero);
            let pa = self.parity.get(mode).copied();
            let pb = other.parity.get(mode).copied();
            let parity = match (pa, pb) {
                (Some(p), Some(q)) if p == q => p,
                (Some(p), None) | (None, Some(p)) => p,
                _ => 0.0,
            };
            out.insert(*mode, x.iter().zip(y).map(|(u, v)| a * u + b * v).collect(), parity);
        }
        Ok(out)
    }

    pub fn to_container(&self) -> Container {
        let mut c = Container::new("radiation", self.dim, self.grid);
        for (mode, g) in &self.modes {
            c.push("G", Some(*mode), g.clone());
            c.push("parity", Some(*mode), vec![self.parity.get(mode).copied().unwrap_or(0.0)]);
        }
        c
    }

    pub fn from_container(c: &Container) -> Result<Self, FieldError> {
        if c.header.kind != "radiation" {
            return Err(FieldError::Container(format!("expected kind \"radiation\", found {:?}", c.header.kind)));
        }
        let mut out = Self::empty(c.header.dimension, c.header.grid);
        for (entry, data) in c.header.arrays.iter().zip(&c.data) {
            let Some(mode) = entry.mode else { continue };
            match entry.name.as_str() {
                "G" => {
                    out.modes.insert(mode, data.clone());
                }
                "parity" => {
                    out.parity.insert(mode, data.first().copied().unwrap_or(0.0));
                }
                _ => {}
            }
        }
        Ok(out)
    }
}
