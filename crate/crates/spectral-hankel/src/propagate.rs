use field_core::{CauchyData, Grid, ModeState, RadialProfile};

/// Free wave group S_L(t) as a per-frequency rotation of (ρ B_0, B_1).
pub fn free_propagate(state: &CauchyData, t: f64) -> CauchyData {
    let modes = state
        .modes
        .iter()
        .map(|(m, s)| {
            let (b0, b1) = rotate(&state.grid, &s.field.spectral, &s.velocity.spectral, t);
            let field = RadialProfile { spectral: b0, physical: None, ..s.field.clone() };
            let velocity = RadialProfile { spectral: b1, physical: None, ..s.velocity.clone() };
            (*m, ModeState { field, velocity })
        })
        .collect();
    CauchyData { dim: state.dim, grid: state.grid, modes }
}

/// û_0 ↦ cos(tρ) û_0 + sin(tρ)/ρ û_1, û_1 ↦ -ρ sin(tρ) û_0 + cos(tρ) û_1.
pub fn rotate(grid: &Grid, b0: &[f64], b1: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    b0.iter()
        .zip(b1)
        .enumerate()
        .map(|(k, (x, y))| {
            let rho = grid.rho(k);
            let (s, c) = (t * rho).sin_cos();
            (c * x + s / rho * y, -rho * s * x + c * y)
        })
        .unzip()
}
