use std::collections::BTreeMap;

use duhamel_engine::*;
use field_core::{CauchyData, Dimension, Grid, ModeIndex, RadialProfile, SourceTerm};
use plr_space::{pi_r, plr_basis};
use proptest::prelude::*;
use spectral_hankel::{free_propagate, hankel_forward, hankel_inverse};

fn profile(mode: ModeIndex, grid: Grid, f: impl Fn(f64) -> f64) -> RadialProfile {
    let v: Vec<f64> = grid.r_nodes().into_iter().map(f).collect();
    hankel_forward(&RadialProfile::zeros(mode, grid).with_physical(v).unwrap()).unwrap()
}

fn separable(
    mode: ModeIndex,
    grid: Grid,
    times: Vec<f64>,
    support: (f64, f64),
    phi: impl Fn(f64) -> f64,
    psi: impl Fn(f64) -> f64,
) -> SourceTerm {
    let p = profile(mode, grid, psi);
    let values = times
        .iter()
        .map(|&t| {
            let a = phi(t);
            let mut slice = BTreeMap::new();
            if a != 0.0 {
                slice.insert(mode, p.scaled(a));
            }
            slice
        })
        .collect();
    SourceTerm::new(Dimension::Three, grid, times, values, support).unwrap()
}

fn nodes(a: f64, b: f64, dt: f64) -> Vec<f64> {
    let n = ((b - a) / dt).round() as usize;
    (0..=n).map(|i| a + i as f64 * dt).collect()
}

fn radial3() -> ModeIndex {
    ModeIndex::radial(Dimension::Three)
}

fn poly_bump(x: f64, c: f64, w: f64) -> f64 {
    let y = (x - c) / w;
    if y.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - y * y).powi(4)
    }
}

fn gaussian_source(grid: Grid) -> SourceTerm {
    separable(radial3(), grid, nodes(-4.0, 4.0, 0.05), (-4.0, 4.0), |t| (-t * t).exp(), |r| (-r * r).exp())
}

fn spectral_distance(a: &CauchyData, b: &CauchyData) -> f64 {
    a.combine(1.0, b, -1.0).unwrap().norm_h()
}

#[test]
fn zero_source_gives_zero() {
    let g = Grid::new(256, 16.0).unwrap();
    let h = SourceTerm::zero(Dimension::Three, g, nodes(-1.0, 1.0, 0.1));
    let tr = duhamel_from_minus_infinity(&h).unwrap();
    assert!(tr.states.iter().all(|s| s.norm_h() == 0.0));
    let sc = extract_scattering(&h).unwrap();
    assert_eq!(sc.v_plus.norm_h(), 0.0);
    let sol = NonradiativeSolution::solve_core(&h, 1.0).unwrap();
    assert_eq!(sol.initial_data().unwrap().norm_h(), 0.0);
    assert_eq!(sol.forward_state().unwrap().norm_h(), 0.0);
}

#[test]
fn nothing_happens_before_the_source() {
    let g = Grid::new(256, 16.0).unwrap();
    let h = separable(radial3(), g, nodes(-2.0, 2.0, 0.05), (0.0, 1.0), |t| poly_bump(t, 0.5, 0.5), |r| poly_bump(r, 2.0, 1.0));
    let sol = DuhamelSolution::new(&h).unwrap();
    for t in [-5.0, -2.0, -1.0, -0.3, 0.0] {
        assert_eq!(sol.state_at(t).norm_h(), 0.0, "t={t}");
    }
    assert!(sol.state_at(0.5).norm_h() > 0.0);
}

#[test]
fn unbounded_or_mislabelled_support_is_rejected() {
    let g = Grid::new(128, 8.0).unwrap();
    let t = nodes(-1.0, 1.0, 0.1);
    let mut h = separable(radial3(), g, t.clone(), (-1.0, 1.0), |_| 1.0, |r| poly_bump(r, 2.0, 1.0));
    h.support = (f64::NEG_INFINITY, 1.0);
    assert!(matches!(DuhamelSolution::new(&h), Err(DuhamelError::UnboundedSupport { .. })));
    let h = separable(radial3(), g, t, (-0.5, 0.5), |_| 1.0, |r| poly_bump(r, 2.0, 1.0));
    assert!(matches!(DuhamelSolution::new(&h), Err(DuhamelError::UnboundedSupport { .. })));
    let h = gaussian_source(g);
    assert!(matches!(NonradiativeSolution::solve_core(&h, 0.0), Err(DuhamelError::Radius(_))));
}

/// Gauss–Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    (p0, p1) = (p1, ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf);
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let w = 2.0 / ((1.0 - x * x) * dp * dp);
                    return (x, w);
                }
            }
        })
        .collect()
}

fn composite(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, gl: &[(f64, f64)]) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let c = a + (p as f64 + 0.5) * h;
            gl.iter().map(|(x, w)| 0.5 * h * w * f(c + 0.5 * h * x)).sum::<f64>()
        })
        .sum()
}

#[test]
fn matches_time_domain_dalembert_duhamel() {
    // For d = 3 radial sources, w = r v solves the half-line equation
    // w_tt - w_rr = r h with w(t, 0) = 0; its Duhamel solution is
    // ½ ∫ [Ψ(r + t - τ) - Ψ(r - t + τ)] φ(τ) dτ with Ψ' the odd extension of r ψ.
    let g = Grid::new(1024, 32.0).unwrap();
    let phi = |t: f64| poly_bump(t, 0.0, 1.0);
    let psi = |r: f64| poly_bump(r, 2.0, 1.0);
    let h = separable(radial3(), g, nodes(-1.0, 1.0, 0.01), (-1.0, 1.0), phi, psi);
    let sol = DuhamelSolution::new(&h).unwrap();
    let gl = gauss_legendre(12);
    let big_psi = |x: f64| {
        let x = x.abs().min(3.0);
        if x <= 1.0 {
            0.0
        } else {
            composite(|r| r * psi(r), 1.0, x, 1, &gl)
        }
    };
    for t in [1.0, 3.0] {
        let v = hankel_inverse(&sol.state_at(t).modes[&radial3()].field).physical.unwrap();
        let (mut err, mut norm) = (0.0, 0.0);
        for (j, r) in g.r_nodes().into_iter().enumerate() {
            if r > 8.0 {
                break;
            }
            let kernel = |tau: f64| 0.5 * phi(tau) * (big_psi(r + t - tau) - big_psi(r - t + tau));
            let w_ref = composite(kernel, -1.0, 1.0, 200, &gl);
            err += (r * v[j] - w_ref).powi(2);
            norm += w_ref * w_ref;
        }
        let rel = (err / norm).sqrt();
        assert!(rel < 1e-3, "t={t} relative L² error {rel}");
    }
}

#[test]
fn remainder_vanishes_past_the_support() {
    let g = Grid::new(512, 32.0).unwrap();
    let h = separable(radial3(), g, nodes(-1.0, 2.0, 0.05), (-1.0, 1.0), |t| poly_bump(t, 0.0, 1.0), |r| poly_bump(r, 3.0, 2.0));
    let sol = DuhamelSolution::new(&h).unwrap();
    let sc = sol.scattering().unwrap();
    let scale = sc.v_plus.norm_h();
    for (t, r) in sc.remainder.times.iter().zip(&sc.remainder.states) {
        if *t >= 1.0 {
            assert!(r.norm_h() <= 1e-8 * scale, "t={t} {}", r.norm_h());
        }
    }
    let vb = sol.state_at(1.0);
    assert!(spectral_distance(&vb, &free_propagate(&sc.v_plus, 1.0)) <= 1e-8 * scale);
    for t in [2.0, 7.5] {
        let d = spectral_distance(&sol.state_at(t), &free_propagate(&vb, t - 1.0));
        assert!(d <= 1e-10 * scale, "t={t} {d}");
    }
}

#[test]
fn narrow_impulse_gives_the_cosine_multiplier() {
    let g = Grid::new(512, 32.0).unwrap();
    let (tau0, eps) = (0.7, 0.002);
    let times = vec![0.0, tau0 - eps, tau0, tau0 + eps, 1.0];
    let psi = |r: f64| poly_bump(r, 2.0, 1.5);
    let h = separable(radial3(), g, times, (tau0 - eps, tau0 + eps), |t| if t == tau0 { 1.0 / eps } else { 0.0 }, psi);
    let vp = extract_scattering(&h).unwrap().v_plus;
    let b1 = &vp.modes[&radial3()].velocity.spectral;
    let p = profile(radial3(), g, psi).spectral;
    let (mut exact_err, mut limit_err, mut norm) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..g.cells() {
        let rho = g.rho(k);
        let x = 0.5 * rho * eps;
        let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
        let exact = (rho * tau0).cos() * sinc * sinc * p[k];
        let limit = (rho * tau0).cos() * p[k];
        exact_err = exact_err.max((b1[k] - exact).abs());
        limit_err = limit_err.max((b1[k] - limit).abs());
        norm = norm.max(p[k].abs());
    }
    assert!(exact_err < 1e-12 * norm, "{exact_err}");
    assert!(limit_err < 1e-4 * norm, "{limit_err}");
}

#[test]
fn wave_equation_residual_is_small() {
    let g = Grid::new(768, 48.0).unwrap();
    let sol = DuhamelSolution::new(&gaussian_source(g)).unwrap();
    let r = sol.residual();
    assert!(r < RESIDUAL_TOL, "{r}");
}

#[test]
fn gaussian_source_meets_all_postconditions() {
    let g = Grid::new(768, 48.0).unwrap();
    let h = gaussian_source(g);
    let sol = nonradiative_source_solve(&h, 1.0, &SolveConfig::default()).unwrap();
    let rep = sol.report.as_ref().unwrap();
    println!("{rep:#?}");
    assert!(rep.residual_ok);
    assert!(rep.energy_ok);
    assert!(rep.projection_ok);
    assert!(rep.linearity_ok);
    assert!(rep.measured_ok);
    assert!(rep.passed);
    assert!(rep.x_constant.is_finite() && rep.x_constant > 0.0);
    assert!(rep.w_norm.is_some());
}

#[test]
fn solve_is_linear() {
    let g = Grid::new(512, 32.0).unwrap();
    let t = nodes(-2.0, 2.0, 0.05);
    let h1 = separable(radial3(), g, t.clone(), (-2.0, 2.0), |t| poly_bump(t, -0.5, 1.5), |r| poly_bump(r, 1.5, 1.5));
    let h2 = separable(radial3(), g, t, (-2.0, 2.0), |t| poly_bump(t, 0.5, 1.0) * t, |r| poly_bump(r, 2.0, 1.0));
    let d = linearity_defect(&h1, &h2, 0.7, -2.3, 1.0).unwrap();
    assert!(d <= LINEARITY_TOL, "{d}");
}

#[test]
fn reprojection_recovers_the_solution() {
    // Perturb u(0) by a P_L(R) member and remove π_R again.
    let g = Grid::new(512, 32.0).unwrap();
    let h = separable(radial3(), g, nodes(-1.0, 1.0, 0.05), (-1.0, 1.0), |t| poly_bump(t, 0.0, 1.0), |r| poly_bump(r, 1.5, 1.0));
    let sol = NonradiativeSolution::solve_core(&h, 1.0).unwrap();
    let u0 = sol.initial_data().unwrap();
    let spec = plr_basis(Dimension::Three, 0, 1.0).unwrap();
    let f0 = spec.materialize_member(0, field_core::Slot::Field, radial3(), g).unwrap();
    let bump = profile(radial3(), g, |r| poly_bump(r, 0.5, 0.4));
    let p = CauchyData::single(f0.scaled(0.3), bump).unwrap();
    let p = pi_r(&p, 1.0).unwrap();
    let perturbed = u0.combine(1.0, &p, 1.0).unwrap();
    let back = perturbed.combine(1.0, &pi_r(&perturbed, 1.0).unwrap(), -1.0).unwrap();
    let d = spectral_distance(&back, &u0);
    assert!(d <= 1e-8 * u0.norm_h().max(1.0), "{d}");
}

#[test]
fn both_scattering_states_are_nonradiative() {
    let g = Grid::new(512, 32.0).unwrap();
    let h = separable(radial3(), g, nodes(-1.0, 1.0, 0.05), (-1.0, 1.0), |t| poly_bump(t, 0.2, 0.8), |r| poly_bump(r, 2.5, 1.5));
    let sol = NonradiativeSolution::solve_core(&h, 1.0).unwrap();
    let scale = sol.forward_state().unwrap().norm_h().powi(2);
    let (fwd, _) = directional_energies(&sol.forward_state().unwrap(), 1.0).unwrap();
    let (_, bwd) = directional_energies(&sol.backward_state().unwrap(), 1.0).unwrap();
    assert!(fwd <= 1e-6 * scale && bwd <= 1e-6 * scale, "{fwd} {bwd}");
    // The free part alone would radiate.
    let (fwd_v, _) = directional_energies(&sol.v_plus, 1.0).unwrap();
    assert!(fwd_v > 1e-3 * sol.v_plus.norm_h().powi(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scattering_state_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, c1 in 0.5f64..2.5, c2 in 1.0f64..3.0) {
        let g = Grid::new(128, 16.0).unwrap();
        let t = nodes(-1.0, 1.0, 0.1);
        let h1 = separable(radial3(), g, t.clone(), (-1.0, 1.0), |t| poly_bump(t, 0.0, 1.0), |r| poly_bump(r, c1, 0.5));
        let h2 = separable(radial3(), g, t, (-1.0, 1.0), |t| poly_bump(t, 0.3, 0.7), |r| poly_bump(r, c2, 0.8));
        let s1 = extract_scattering(&h1).unwrap().v_plus;
        let s2 = extract_scattering(&h2).unwrap().v_plus;
        let s = extract_scattering(&h1.combine(a, &h2, b).unwrap()).unwrap().v_plus;
        let d = spectral_distance(&s, &s1.combine(a, &s2, b).unwrap());
        prop_assert!(d <= 1e-12 * (a.abs() * s1.norm_h() + b.abs() * s2.norm_h()).max(1e-300));
    }

    #[test]
    fn step_composition_matches_one_step(t in 0.05f64..0.95) {
        // Evaluating between nodes and then free-evolving agrees with the node values.
        let g = Grid::new(128, 16.0).unwrap();
        let h = separable(radial3(), g, vec![-1.0, 0.0, 1.0], (-1.0, 1.0), |t| 1.0 - t.abs(), |r| poly_bump(r, 2.0, 1.0));
        let sol = DuhamelSolution::new(&h).unwrap();
        let end = sol.state_at(1.0);
        let mid = sol.state_at(t);
        // After the source stops the two must agree under free evolution.
        let far = sol.state_at(1.0 + t);
        prop_assert!(spectral_distance(&far, &free_propagate(&end, t)) <= 1e-12 * end.norm_h());
        prop_assert!(mid.norm_h() > 0.0);
    }
}
