//! Riccati–Bessel functions ŝ_n(x) = x j_n(x) of integer index, i.e. the
//! half-integer order Bessel kernels of odd dimensions.

const SERIES_TERMS: usize = 40;

/// ŝ_n(x) and its derivative.
pub fn riccati_bessel(n: usize, x: f64) -> (f64, f64) {
    riccati_bessel_trig(n, x, x.sin(), x.cos())
}

/// Same as [`riccati_bessel`] with sin x and cos x supplied by the caller.
pub fn riccati_bessel_trig(n: usize, x: f64, sin: f64, cos: f64) -> (f64, f64) {
    if n == 0 {
        return (sin, cos);
    }
    if x.abs() < 1.0 + n as f64 {
        return series(n, x);
    }
    // Upward recurrence ŝ_{k+1} = (2k+1)/x ŝ_k - ŝ_{k-1}, started from ŝ_{-1} = cos.
    let inv = 1.0 / x;
    let mut prev = cos;
    let mut cur = sin;
    for k in 0..n {
        let next = (2 * k + 1) as f64 * inv * cur - prev;
        prev = cur;
        cur = next;
    }
    (cur, prev - n as f64 * inv * cur)
}

fn series(n: usize, x: f64) -> (f64, f64) {
    let dfact: f64 = (1..=n).map(|k| (2 * k + 1) as f64).product();
    let x2 = x * x;
    let mut term = x.powi(n as i32) / dfact;
    let mut val = 0.0;
    let mut der = 0.0;
    for k in 0..SERIES_TERMS {
        let p = (n + 1 + 2 * k) as f64;
        val += term * x;
        der += term * p;
        term *= -0.5 * x2 / ((k + 1) as f64 * (2 * n + 2 * k + 3) as f64);
        if term.abs() < 1e-18 * val.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    (val, der)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed(n: usize, x: f64) -> f64 {
        let (s, c) = (x.sin(), x.cos());
        match n {
            0 => s,
            1 => s / x - c,
            2 => (3.0 / (x * x) - 1.0) * s - 3.0 * c / x,
            3 => (15.0 / x.powi(3) - 6.0 / x) * s - (15.0 / (x * x) - 1.0) * c,
            _ => unreachable!(),
        }
    }

    #[test]
    fn matches_closed_forms_away_from_origin() {
        for n in 0..4 {
            for &x in &[1.5, 3.0, 4.2, 7.7, 25.0, 300.0] {
                let (v, _) = riccati_bessel(n, x);
                assert!((v - closed(n, x)).abs() < 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn small_argument_leading_power() {
        for n in 1..4usize {
            let x: f64 = 1e-3;
            let dfact: f64 = (1..=n).map(|k| (2 * k + 1) as f64).product();
            let lead = x.powi(n as i32 + 1) / dfact;
            let (v, _) = riccati_bessel(n, x);
            assert!((v / lead - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for n in 0..4 {
            for &x in &[0.3, 1.0, 2.5, 4.0, 4.5, 9.0] {
                let e = 1e-6;
                let fd = (riccati_bessel(n, x + e).0 - riccati_bessel(n, x - e).0) / (2.0 * e);
                assert!((riccati_bessel(n, x).1 - fd).abs() < 1e-8, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn branches_agree_at_switch() {
        for n in 1..4usize {
            let x = 1.0 + n as f64;
            let a = series(n, x);
            let b = riccati_bessel_trig(n, x + 1e-13, (x + 1e-13).sin(), (x + 1e-13).cos());
            assert!((a.0 - b.0).abs() < 1e-11 && (a.1 - b.1).abs() < 1e-11);
        }
    }
}
