use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::FieldError;

/// Linked radial / frequency / light-cone grid.
///
/// With cell size h = L / M the radial nodes are the cell centres
/// r_j = (j + 1/2) h, the frequencies are ρ_k = (k + 1/2) π / L and the
/// light-cone grid is the symmetric set ±(j + 1/2) h of 2M points. Half-integer
/// frequencies against half-integer nodes make the sine and cosine sums
/// exactly orthogonal, so the frequency origin is never sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    cells: usize,
    extent: f64,
}

impl Grid {
    pub fn new(cells: usize, extent: f64) -> Result<Self, FieldError> {
        if cells < 2 {
            return Err(FieldError::Grid(format!("need at least 2 cells, got {cells}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(FieldError::Grid(format!("extent must be positive, got {extent}")));
        }
        Ok(Self { cells, extent })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// r_max = s_max = L.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn step(&self) -> f64 {
        self.extent / self.cells as f64
    }

    pub fn r(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.step()
    }

    pub fn rho(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.rho_step()
    }

    pub fn rho_step(&self) -> f64 {
        PI / self.extent
    }

    pub fn rho_max(&self) -> f64 {
        self.rho(self.cells - 1)
    }

    pub fn r_nodes(&self) -> Vec<f64> {
        (0..self.cells).map(|j| self.r(j)).collect()
    }

    pub fn rho_nodes(&self) -> Vec<f64> {
        (0..self.cells).map(|k| self.rho(k)).collect()
    }

    /// Symmetric light-cone nodes, ascending, length 2M.
    pub fn s_nodes(&self) -> Vec<f64> {
        let m = self.cells as f64;
        let h = self.step();
        (0..2 * self.cells).map(|i| (i as f64 + 0.5 - m) * h).collect()
    }

    /// Index on the light-cone grid of the node s = r_j.
    pub fn s_index_of_r(&self, j: usize) -> usize {
        self.cells + j
    }

    /// Index on the light-cone grid of the node s = -r_j.
    pub fn s_index_of_neg_r(&self, j: usize) -> usize {
        self.cells - 1 - j
    }

    /// Spectral weight turning Σ_k B_k² into the L² norm: 2 / L.
    pub fn spectral_weight(&self) -> f64 {
        2.0 / self.extent
    }

    /// First radial cell whose centre lies beyond `r`.
    pub fn first_cell_beyond(&self, r: f64) -> usize {
        let x = r / self.step() - 0.5;
        if x < 0.0 {
            0
        } else {
            (x.floor() as usize + 1).min(self.cells)
        }
    }

    pub fn radial(&self) -> RadialGrid {
        RadialGrid {
            nodes: self.r_nodes(),
            weights: vec![self.step(); self.cells],
            r_max: self.extent,
        }
    }

    pub fn frequency(&self) -> FrequencyGrid {
        FrequencyGrid {
            nodes: self.rho_nodes(),
            weights: vec![self.rho_step(); self.cells],
            rho_max: self.rho_max(),
        }
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<(), FieldError> {
        if self == other {
            Ok(())
        } else {
            Err(FieldError::GridMismatch {
                left: format!("{self:?}"),
                right: format!("{other:?}"),
            })
        }
    }
}

/// Midpoint quadrature on the radial cells.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub r_max: f64,
}

impl RadialGrid {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * f(r)).sum()
    }
}

/// Midpoint quadrature on the half-integer frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub rho_max: f64,
}
