use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Exponential sums over odd indices: the phases e^{±iπ p q / (4M)} that
/// couple half-integer frequencies to half-integer nodes. Evaluated with one
/// length-8M FFT.
pub struct OddFourier {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    /// e^{-iπpq/(4M)}
    Negative,
    /// e^{+iπpq/(4M)}
    Positive,
}

impl OddFourier {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { m, forward: planner.plan_fft_forward(8 * m), inverse: planner.plan_fft_inverse(8 * m) }
    }

    /// Process-wide instance for `m` cells.
    pub fn shared(m: usize) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<OddFourier>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("fft cache poisoned");
        guard.entry(m).or_insert_with(|| Arc::new(Self::new(m))).clone()
    }

    pub fn cells(&self) -> usize {
        self.m
    }

    fn wrap(&self, p: i64) -> usize {
        p.rem_euclid(8 * self.m as i64) as usize
    }

    fn run(&self, buf: &mut [Complex64], sign: Sign) {
        match sign {
            Sign::Negative => self.forward.process(buf),
            Sign::Positive => self.inverse.process(buf),
        }
    }

    /// Full-line sum: index i of input and output stands for the odd integer
    /// 2i + 1 - 2M. Returns out_q = Σ_p c_p e^{±iπpq/(4M)}.
    pub fn full_line(&self, coeffs: &[Complex64], sign: Sign) -> Vec<Complex64> {
        let m = self.m as i64;
        assert_eq!(coeffs.len(), 2 * self.m);
        let mut buf = vec![Complex64::new(0.0, 0.0); 8 * self.m];
        for (i, c) in coeffs.iter().enumerate() {
            buf[self.wrap(2 * i as i64 + 1 - 2 * m)] = *c;
        }
        self.run(&mut buf, sign);
        (0..2 * self.m).map(|i| buf[self.wrap(2 * i as i64 + 1 - 2 * m)]).collect()
    }

    /// Half-range sums z_k = Σ_j x_j e^{-iπ(2j+1)(2k+1)/(4M)}.
    fn half(&self, x: &[f64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.m);
        let mut buf = vec![Complex64::new(0.0, 0.0); 8 * self.m];
        for (j, v) in x.iter().enumerate() {
            buf[2 * j + 1] = Complex64::new(*v, 0.0);
        }
        self.run(&mut buf, Sign::Negative);
        (0..self.m).map(|k| buf[2 * k + 1]).collect()
    }

    /// y_k = Σ_j x_j sin(π(2j+1)(2k+1)/(4M)).
    pub fn sine(&self, x: &[f64]) -> Vec<f64> {
        self.half(x).into_iter().map(|z| -z.im).collect()
    }

    /// y_k = Σ_j x_j cos(π(2j+1)(2k+1)/(4M)).
    pub fn cosine(&self, x: &[f64]) -> Vec<f64> {
        self.half(x).into_iter().map(|z| z.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_range_sums_match_direct() {
        let m = 12;
        let f = OddFourier::new(m);
        let x: Vec<f64> = (0..m).map(|j| ((j * j) as f64 * 0.37).sin()).collect();
        let s = f.sine(&x);
        let c = f.cosine(&x);
        for k in 0..m {
            let arg = |j: usize| PI * ((2 * j + 1) * (2 * k + 1)) as f64 / (4 * m) as f64;
            let ds: f64 = (0..m).map(|j| x[j] * arg(j).sin()).sum();
            let dc: f64 = (0..m).map(|j| x[j] * arg(j).cos()).sum();
            assert!((s[k] - ds).abs() < 1e-12 && (c[k] - dc).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_sum_is_orthogonal() {
        let m = 16;
        let f = OddFourier::new(m);
        let x: Vec<f64> = (0..m).map(|j| 1.0 / (1.0 + j as f64)).collect();
        let back = f.sine(&f.sine(&x));
        for j in 0..m {
            assert!((back[j] * 2.0 / m as f64 - x[j]).abs() < 1e-13);
        }
    }

    #[test]
    fn full_line_matches_direct() {
        let m = 6;
        let f = OddFourier::new(m);
        let c: Vec<Complex64> = (0..2 * m).map(|i| Complex64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.05)).collect();
        let out = f.full_line(&c, Sign::Positive);
        for (qi, o) in out.iter().enumerate() {
            let q = 2 * qi as i64 + 1 - 2 * m as i64;
            let d: Complex64 = c
                .iter()
                .enumerate()
                .map(|(pi, cp)| {
                    let p = 2 * pi as i64 + 1 - 2 * m as i64;
                    cp * Complex64::from_polar(1.0, PI * (p * q) as f64 / (4 * m) as f64)
                })
                .sum();
            assert!((o - d).norm() < 1e-12);
        }
    }
}
