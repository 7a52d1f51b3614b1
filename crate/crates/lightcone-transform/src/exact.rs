//! Closed-form light-cone profiles of piecewise power laws.
//!
//! On a mode with Bessel index n, for s > 0,
//! `T v(s) = 2^{-1/2} [w(s) - ∫_s^∞ w(r) P_n'(s/r) dr/r]` with `w = r^{(d-1)/2} v`,
//! and the values on s < 0 follow from the range parity.

use field_core::{Grid, ModeIndex, Slot};

use crate::transform::{slot_parity, LightconeError};

/// `coef · r^exponent` on `[start, end)`; `end` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPiece {
    pub start: f64,
    pub end: f64,
    pub coef: f64,
    pub exponent: f64,
}

/// A radial profile v(r) given as a sum of power-law pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawProfile {
    pub mode: ModeIndex,
    pub pieces: Vec<PowerPiece>,
}

/// Monomial coefficients of the Legendre polynomial P_n.
pub fn legendre_coeffs(n: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for k in 1..n {
        let kf = k as f64;
        let mut next = vec![0.0; k + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += (2.0 * kf + 1.0) * c / (kf + 1.0);
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= kf * c / (kf + 1.0);
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, a)| i as f64 * a).collect()
}

/// ∫_lo^hi r^g dr; `None` when the integral diverges at infinity.
fn power_integral(lo: f64, hi: f64, g: f64) -> Option<f64> {
    if hi <= lo {
        return Some(0.0);
    }
    if (g + 1.0).abs() < 1e-12 {
        return hi.is_finite().then(|| (hi / lo).ln());
    }
    if hi.is_infinite() {
        return (g < -1.0).then(|| -lo.powf(g + 1.0) / (g + 1.0));
    }
    Some((hi.powf(g + 1.0) - lo.powf(g + 1.0)) / (g + 1.0))
}

impl PowerLawProfile {
    pub fn new(mode: ModeIndex, pieces: Vec<PowerPiece>) -> Self {
        Self { mode, pieces }
    }

    fn weight(&self) -> f64 {
        self.mode.radial_weight_power()
    }

    /// v(r).
    pub fn value(&self, r: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|p| r >= p.start && r < p.end)
            .map(|p| p.coef * r.powf(p.exponent))
            .sum()
    }

    /// Samples of v on the radial nodes.
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.r_nodes().into_iter().map(|r| self.value(r)).collect()
    }

    fn w(&self, s: f64) -> f64 {
        s.powf(self.weight()) * self.value(s)
    }

    fn dw(&self, s: f64) -> f64 {
        let p = self.weight();
        self.pieces
            .iter()
            .filter(|q| s >= q.start && s < q.end)
            .map(|q| q.coef * (q.exponent + p) * s.powf(q.exponent + p - 1.0))
            .sum()
    }

    /// Σ_i c_i s^i ∫_{max(s,a)}^b w(r) r^{-i-shift} dr over pieces.
    fn moment(&self, s: f64, poly: &[f64], shift: f64) -> Result<f64, LightconeError> {
        let p = self.weight();
        let mut acc = 0.0;
        for q in &self.pieces {
            let lo = q.start.max(s);
            for (i, c) in poly.iter().enumerate() {
                if *c == 0.0 {
                    continue;
                }
                let g = q.exponent + p - i as f64 - shift;
                let integral = power_integral(lo, q.end, g).ok_or(LightconeError::Divergent { mode: self.mode })?;
                acc += c * q.coef * s.powi(i as i32) * integral;
            }
        }
        Ok(acc)
    }

    /// T v(s) for s > 0.
    pub fn t(&self, s: f64) -> Result<f64, LightconeError> {
        let dp = derivative(&legendre_coeffs(self.mode.bessel_index()));
        Ok((self.w(s) - self.moment(s, &dp, 1.0)?) / std::f64::consts::SQRT_2)
    }

    /// ∂_s T v(s) for s > 0.
    pub fn ds_t(&self, s: f64) -> Result<f64, LightconeError> {
        let n = self.mode.bessel_index() as f64;
        let ddp = derivative(&derivative(&legendre_coeffs(self.mode.bessel_index())));
        let edge = self.w(s) * n * (n + 1.0) / (2.0 * s);
        Ok((self.dw(s) + edge - self.moment(s, &ddp, 2.0)?) / std::f64::consts::SQRT_2)
    }

    /// T v (velocity slot) or ∂_s T v (field slot) on the full s-grid.
    pub fn radiation_samples(&self, grid: &Grid, slot: Slot) -> Result<Vec<f64>, LightconeError> {
        let m = grid.cells();
        let eps = slot_parity(&self.mode, slot);
        let mut out = vec![0.0; 2 * m];
        for j in 0..m {
            let s = grid.r(j);
            let g = match slot {
                Slot::Velocity => self.t(s)?,
                Slot::Field => self.ds_t(s)?,
            };
            out[grid.s_index_of_r(j)] = g;
            out[grid.s_index_of_neg_r(j)] = eps * g;
        }
        Ok(out)
    }
}
