use num_complex::Complex64;
use std::f64::consts::PI;

use field_core::{CauchyData, Dimension, FieldError, Grid, ModeIndex, ModeState, RadialProfile, Slot};
use spectral_hankel::{fourier_constant, phase, vhat, OddFourier, Sign};

use crate::RadiationProfile;

/// Relative imaginary residue tolerated before the phase bookkeeping is declared broken.
const REALITY_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum LightconeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("cone radius must be positive, got {0}")]
    Radius(f64),
    #[error("mode {mode}: synthesized profile has imaginary residue {residue:.3e}")]
    Reality { mode: ModeIndex, residue: f64 },
    #[error("mode {mode}: parity defect {defect:.3e} exceeds tolerance")]
    Parity { mode: ModeIndex, defect: f64 },
    #[error("mode {mode}: power-law profile has a divergent light-cone integral")]
    Divergent { mode: ModeIndex },
    #[error("mode {mode}: samples on s < -R do not have the parity {expected} required by the slot")]
    WrongParity { mode: ModeIndex, expected: f64 },
}

/// c_0 = (2 (2π)^{d-1})^{-1/2}.
pub fn c0(d: Dimension) -> f64 {
    1.0 / (2.0 * (2.0 * PI).powf(d.as_f64() - 1.0)).sqrt()
}

/// τ = (d - 1) π / 4.
pub fn tau(d: Dimension) -> f64 {
    (d.as_f64() - 1.0) * PI / 4.0
}

/// Parity of T v on the given mode: σ_T(d) (-1)^l.
pub fn t_parity(mode: &ModeIndex) -> f64 {
    mode.d.range_sign() * mode.parity()
}

/// Parity of the output of `apply_T` (velocity slot) or `apply_dsT` (field slot).
pub fn slot_parity(mode: &ModeIndex, slot: Slot) -> f64 {
    match slot {
        Slot::Velocity => t_parity(mode),
        Slot::Field => -t_parity(mode),
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Index on the odd full-line layout of +ν_k and -ν_k.
fn pos(m: usize, k: usize) -> usize {
    m + k
}
fn neg(m: usize, k: usize) -> usize {
    m - 1 - k
}

/// G(s_j) = (1/2π) Δν Σ_{±k} Ĝ(ν) e^{iνs_j}; returns the real part and checks the imaginary residue.
fn synthesize(mode: &ModeIndex, grid: &Grid, spectrum: &[Complex64]) -> Result<Vec<f64>, LightconeError> {
    let f = OddFourier::shared(grid.cells());
    let scale = grid.rho_step() / (2.0 * PI);
    let out = f.full_line(spectrum, Sign::Positive);
    let peak = out.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let residue = out.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residue > REALITY_TOL * peak.max(f64::MIN_POSITIVE) && residue * scale > 1e-300 {
        return Err(LightconeError::Reality { mode: *mode, residue: residue / peak });
    }
    Ok(out.into_iter().map(|z| scale * z.re).collect())
}

/// Ĝ(ν_p) = h Σ_j G(s_j) e^{-iν_p s_j} on the full odd layout.
pub fn analyze(grid: &Grid, g: &[f64]) -> Vec<Complex64> {
    let f = OddFourier::shared(grid.cells());
    let h = grid.step();
    let input: Vec<Complex64> = g.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    f.full_line(&input, Sign::Negative).into_iter().map(|z| h * z).collect()
}

/// Full-line spectrum of T v: c_0 |ν|^{(d-1)/2} e^{∓iτ} v̂(νω), using v̂(-|ν|ω) = (-1)^l v̂(|ν|ω)
/// on the mode. `derivative` multiplies by iν.
fn t_spectrum(p: &RadialProfile, derivative: bool) -> Vec<Complex64> {
    let grid = p.grid;
    let m = grid.cells();
    let d = p.mode.d;
    let half = f64::from(d.half_order());
    let c = c0(d);
    let e_minus = Complex64::from_polar(1.0, -tau(d));
    let e_plus = Complex64::from_polar(1.0, tau(d));
    let v = vhat(p);
    let mut out = vec![zero(); 2 * m];
    for (k, vk) in v.iter().enumerate() {
        let nu = grid.rho(k);
        let base = c * nu.powf(half);
        let mut gp = base * e_minus * vk;
        let mut gn = base * e_plus * p.mode.parity() * vk;
        if derivative {
            gp *= Complex64::new(0.0, nu);
            gn *= Complex64::new(0.0, -nu);
        }
        out[pos(m, k)] = gp;
        out[neg(m, k)] = gn;
    }
    out
}

fn check_parity(mode: &ModeIndex, g: &[f64], eps: f64) -> Result<(), LightconeError> {
    let m = g.len() / 2;
    let peak = g.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let defect = (0..m).map(|j| (g[m - 1 - j] - eps * g[m + j]).abs()).fold(0.0, f64::max);
    if defect > 1e-10 * peak.max(f64::MIN_POSITIVE) && defect > 1e-300 {
        return Err(LightconeError::Parity { mode: *mode, defect });
    }
    Ok(())
}

fn single(mode: ModeIndex, grid: Grid, g: Vec<f64>, eps: f64) -> RadiationProfile {
    let mut out = RadiationProfile::empty(mode.d, grid);
    out.insert(mode, g, eps);
    out
}

/// T v for one mode.
#[allow(non_snake_case)]
pub fn apply_T(v: &RadialProfile) -> Result<RadiationProfile, LightconeError> {
    let g = synthesize(&v.mode, &v.grid, &t_spectrum(v, false))?;
    let eps = slot_parity(&v.mode, Slot::Velocity);
    check_parity(&v.mode, &g, eps)?;
    Ok(single(v.mode, v.grid, g, eps))
}

/// ∂_s T v for one mode, by multiplication with iν before synthesis.
#[allow(non_snake_case)]
pub fn apply_dsT(v: &RadialProfile) -> Result<RadiationProfile, LightconeError> {
    let g = synthesize(&v.mode, &v.grid, &t_spectrum(v, true))?;
    let eps = slot_parity(&v.mode, Slot::Field);
    check_parity(&v.mode, &g, eps)?;
    Ok(single(v.mode, v.grid, g, eps))
}

/// F = ∂_s T v_0 - T v_1, mode by mode.
pub fn radiation_field(state: &CauchyData) -> Result<RadiationProfile, LightconeError> {
    let mut out = RadiationProfile::empty(state.dim, state.grid);
    for (mode, s) in &state.modes {
        let a = apply_dsT(&s.field)?;
        let b = apply_T(&s.velocity)?;
        let f: Vec<f64> = a.modes[mode].iter().zip(&b.modes[mode]).map(|(x, y)| x - y).collect();
        out.insert(*mode, f, 0.0);
    }
    Ok(out)
}

/// Spectral samples B_k from the complex Fourier coefficient v̂(ρ_k ω).
fn spectral_from_vhat(mode: &ModeIndex, grid: &Grid, vh: &[Complex64]) -> Vec<f64> {
    let c = fourier_constant(mode.d) * phase(mode.l);
    let e = mode.radial_weight_power();
    vh.iter()
        .enumerate()
        .map(|(k, z)| (z / c).re * grid.rho(k).powf(e))
        .collect()
}

/// Inverse of the radiation map through its Fourier description.
pub fn invert_radiation(f: &RadiationProfile) -> Result<CauchyData, LightconeError> {
    let grid = f.grid;
    let m = grid.cells();
    let d = f.dim;
    let half = f64::from(d.half_order());
    let c = c0(d);
    let e_plus = Complex64::from_polar(1.0, tau(d));
    let e_minus = Complex64::from_polar(1.0, -tau(d));
    let mut out = CauchyData::empty(d, grid);
    for (mode, g) in &f.modes {
        let spec = analyze(&grid, g);
        let sign = mode.parity();
        let mut v0 = Vec::with_capacity(m);
        let mut v1 = Vec::with_capacity(m);
        for k in 0..m {
            let rho = grid.rho(k);
            let fp = spec[pos(m, k)];
            let fm = sign * spec[neg(m, k)];
            let a = e_plus * fp;
            let b = e_minus * fm;
            v0.push((a - b) / (Complex64::new(0.0, 2.0) * c * rho.powf(half + 1.0)));
            v1.push(-(a + b) / (2.0 * c * rho.powf(half)));
        }
        let field = RadialProfile::from_spectral(*mode, grid, spectral_from_vhat(mode, &grid, &v0))?;
        let velocity = RadialProfile::from_spectral(*mode, grid, spectral_from_vhat(mode, &grid, &v1))?;
        out.insert(ModeState { field, velocity })?;
    }
    Ok(out)
}

/// The profile whose T (velocity slot) or ∂_s T (field slot) is `g`, which
/// must already carry the slot's parity.
pub fn invert_slot(mode: ModeIndex, grid: Grid, g: &[f64], slot: Slot) -> Result<RadialProfile, LightconeError> {
    let m = grid.cells();
    let d = mode.d;
    let half = f64::from(d.half_order());
    let c = c0(d);
    let e_plus = Complex64::from_polar(1.0, tau(d));
    let spec = analyze(&grid, g);
    let vh: Vec<Complex64> = (0..m)
        .map(|k| {
            let rho = grid.rho(k);
            let mut z = e_plus * spec[pos(m, k)] / (c * rho.powf(half));
            if slot == Slot::Field {
                z /= Complex64::new(0.0, rho);
            }
            z
        })
        .collect();
    Ok(RadialProfile::from_spectral(mode, grid, spectral_from_vhat(&mode, &grid, &vh))?)
}

/// One-sided inverse G_R: extends the s > R part of `f_half` by the slot's
/// range parity, zeroes [-R, R], and inverts.
pub fn partial_inverse_g(
    f_half: &RadiationProfile,
    mode: &ModeIndex,
    slot: Slot,
    r: f64,
) -> Result<RadialProfile, LightconeError> {
    if !(r > 0.0) {
        return Err(LightconeError::Radius(r));
    }
    let grid = f_half.grid;
    let m = grid.cells();
    let eps = slot_parity(mode, slot);
    let Some(src) = f_half.modes.get(mode) else {
        return Ok(RadialProfile::zeros(*mode, grid));
    };
    let start = grid.first_cell_beyond(r);
    let mut g = vec![0.0; 2 * m];
    let scale = src.iter().map(|x| x.abs()).fold(0.0, f64::max);
    for j in start..m {
        let given_neg = src[neg(m, j)];
        if given_neg != 0.0 && (given_neg - eps * src[pos(m, j)]).abs() > 1e-10 * scale {
            return Err(LightconeError::WrongParity { mode: *mode, expected: eps });
        }
        g[pos(m, j)] = src[pos(m, j)];
        g[neg(m, j)] = eps * src[pos(m, j)];
    }
    invert_slot(*mode, grid, &g, slot)
}

/// Zeroes a profile on |s| ≤ R, keeping cells whose centres lie beyond R.
pub fn restrict_outside(f: &RadiationProfile, r: f64) -> RadiationProfile {
    let m = f.grid.cells();
    let start = f.grid.first_cell_beyond(r);
    let mut out = f.clone();
    for g in out.modes.values_mut() {
        for j in 0..start.min(m) {
            g[pos(m, j)] = 0.0;
            g[neg(m, j)] = 0.0;
        }
    }
    out
}
