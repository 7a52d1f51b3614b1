use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use field_core::Grid;

use crate::bessel::riccati_bessel_trig;
use crate::odd_fourier::OddFourier;

/// Fourier–Bessel pair for one Riccati–Bessel index on a linked grid.
///
/// Forward: `B_k = h Σ_j w_j ŝ_n(ρ_k r_j)`. Inverse: `w_j = (2/L) Σ_k B_k ŝ_n(ρ_k r_j)`.
/// Index 0 is a DST-IV pair and is applied by FFT; higher indices use a dense
/// kernel built once from a sin/cos table.
pub struct ModeTransform {
    n: usize,
    grid: Grid,
    fourier: Arc<OddFourier>,
    kernel: OnceLock<Vec<f64>>,
    dkernel: OnceLock<Vec<f64>>,
}

type Key = (usize, usize, u64);

impl ModeTransform {
    pub fn new(n: usize, grid: Grid) -> Self {
        Self {
            n,
            grid,
            fourier: OddFourier::shared(grid.cells()),
            kernel: OnceLock::new(),
            dkernel: OnceLock::new(),
        }
    }

    pub fn shared(n: usize, grid: Grid) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<Key, Arc<ModeTransform>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (n, grid.cells(), grid.extent().to_bits());
        let mut guard = cache.lock().expect("transform cache poisoned");
        guard.entry(key).or_insert_with(|| Arc::new(Self::new(n, grid))).clone()
    }

    pub fn index(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    fn build(&self, deriv: bool) -> Vec<f64> {
        let m = self.grid.cells();
        let period = 8 * m;
        let table: Vec<(f64, f64)> =
            (0..period).map(|q| (PI * q as f64 / (4 * m) as f64).sin_cos()).collect();
        let mut out = vec![0.0; m * m];
        for k in 0..m {
            for j in 0..m {
                let q = (2 * k + 1) * (2 * j + 1);
                let x = PI * q as f64 / (4 * m) as f64;
                let (s, c) = table[q % period];
                let (v, dv) = riccati_bessel_trig(self.n, x, s, c);
                out[k * m + j] = if deriv { dv } else { v };
            }
        }
        out
    }

    fn kernel(&self) -> &[f64] {
        self.kernel.get_or_init(|| self.build(false))
    }

    fn dkernel(&self) -> &[f64] {
        self.dkernel.get_or_init(|| self.build(true))
    }

    pub fn forward_w(&self, w: &[f64]) -> Vec<f64> {
        let h = self.grid.step();
        if self.n == 0 {
            return self.fourier.sine(w).into_iter().map(|b| h * b).collect();
        }
        let m = self.grid.cells();
        self.kernel()
            .chunks_exact(m)
            .map(|row| h * row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>())
            .collect()
    }

    /// The forward quadrature evaluated at an arbitrary frequency.
    pub fn sample_at(&self, w: &[f64], rho: f64) -> f64 {
        let h = self.grid.step();
        w.iter()
            .enumerate()
            .map(|(j, x)| h * x * riccati_bessel_trig(self.n, rho * self.grid.r(j), (rho * self.grid.r(j)).sin(), (rho * self.grid.r(j)).cos()).0)
            .sum()
    }

    pub fn inverse_w(&self, b: &[f64]) -> Vec<f64> {
        let c = self.grid.spectral_weight();
        if self.n == 0 {
            return self.fourier.sine(b).into_iter().map(|w| c * w).collect();
        }
        transpose_apply(self.kernel(), b, self.grid.cells(), c)
    }

    /// w'(r_j) from spectral samples.
    pub fn inverse_dw(&self, b: &[f64]) -> Vec<f64> {
        let c = self.grid.spectral_weight();
        let rb: Vec<f64> = b.iter().enumerate().map(|(k, x)| self.grid.rho(k) * x).collect();
        if self.n == 0 {
            return self.fourier.cosine(&rb).into_iter().map(|w| c * w).collect();
        }
        transpose_apply(self.dkernel(), &rb, self.grid.cells(), c)
    }
}

fn transpose_apply(kernel: &[f64], b: &[f64], m: usize, scale: f64) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for (row, bk) in kernel.chunks_exact(m).zip(b) {
        if *bk == 0.0 {
            continue;
        }
        for (o, a) in out.iter_mut().zip(row) {
            *o += a * bk;
        }
    }
    out.iter_mut().for_each(|o| *o *= scale);
    out
}
