//! Exact time integration of the wave multipliers against a source that is
//! linear in time on each interval.

const SERIES_CUTOFF: f64 = 1e-2;

/// (1 - cos x) / x.
fn a(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        x * (0.5 - x2 / 24.0 + x2 * x2 / 720.0)
    } else {
        (1.0 - x.cos()) / x
    }
}

/// (sin x - x cos x) / x².
fn b(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        x * (1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0)
    } else {
        (x.sin() - x * x.cos()) / (x * x)
    }
}

/// sin x / x.
fn c(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// (x sin x + cos x - 1) / x².
fn e(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        0.5 - x2 / 8.0 + x2 * x2 / 144.0
    } else {
        (x * x.sin() + x.cos() - 1.0) / (x * x)
    }
}

/// Advances (v̂, ∂_t v̂) at frequency ρ over a step dt during which the
/// source moves linearly from `h0` to `h1`.
pub fn step(rho: f64, dt: f64, b0: f64, b1: f64, h0: f64, h1: f64) -> (f64, f64) {
    let (s, co) = (rho * dt).sin_cos();
    let r0 = co * b0 + s / rho * b1;
    let r1 = -rho * s * b0 + co * b1;
    let x = rho * dt;
    let delta = h1 - h0;
    // Source samples measured backwards from the end of the step: h(σ) = h1 - δ σ/dt.
    let f0 = dt * (h1 * a(x) - delta * b(x)) / rho;
    let f1 = dt * (h1 * c(x) - delta * e(x));
    (r0 + f0, r1 + f1)
}

/// ∫_{t0}^{t0+dt} e^{iρτ} h(τ) dτ for h linear from `h0` to `h1`, as (re, im).
pub fn oscillatory_integral(rho: f64, t0: f64, dt: f64, h0: f64, h1: f64) -> (f64, f64) {
    let x = rho * dt;
    let delta = h1 - h0;
    let re = dt * (h0 * c(x) + delta * e(x));
    let im = dt * (h0 * a(x) + delta * b(x));
    let (s, co) = (rho * t0).sin_cos();
    (co * re - s * im, s * re + co * im)
}
