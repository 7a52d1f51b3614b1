use field_core::{h_inner, CauchyData, Dimension, Grid, ModeIndex, RadialProfile, Slot};
use plr_space::*;
use proptest::prelude::*;
use spectral_hankel::{free_propagate, hankel_forward, hankel_inverse};

const CASES: [(u32, u32); 6] = [(3, 0), (3, 1), (3, 2), (5, 0), (5, 1), (5, 2)];

fn dim(d: u32) -> Dimension {
    Dimension::new(d).unwrap()
}

#[test]
fn admissible_sets_follow_exponent_arithmetic() {
    let expect: [(&[usize], &[usize]); 6] =
        [(&[0], &[]), (&[0], &[0]), (&[0, 1], &[0]), (&[0], &[0]), (&[0, 1], &[0]), (&[0, 1], &[0, 1])];
    for ((d, l), (h1, l2)) in CASES.iter().zip(expect) {
        let s = plr_basis(dim(*d), *l, 1.0).unwrap();
        assert_eq!(s.k_h1, h1, "d={d} l={l}");
        assert_eq!(s.k_l2, l2, "d={d} l={l}");
        assert!(s.k_l2.iter().all(|k| s.k_h1.contains(k)));
    }
    assert_eq!(alpha(dim(3), 0, 0), -1.0);
    assert_eq!(alpha(dim(5), 0, 0), -3.0);
    assert_eq!((alpha(dim(3), 2, 0), alpha(dim(3), 2, 1)), (-3.0, -1.0));
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
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

/// Composite Gauss–Legendre on [a, b].
fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(12);
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * w;
            rule.iter().map(|(x, wt)| 0.5 * w * wt * f(lo + 0.5 * w * (x + 1.0))).sum::<f64>()
        })
        .sum()
}

/// ∫_R^∞ f(r) dr through r = R/x.
fn quad_exterior(f: impl Fn(f64) -> f64, r: f64) -> f64 {
    quad(|x| if x <= 0.0 { 0.0 } else { f(r / x) * r / (x * x) }, 0.0, 1.0, 64)
}

#[test]
fn gram_matrices_match_quadrature() {
    for (d, l) in CASES {
        for radius in [0.5, 1.0, 2.0] {
            let s = plr_basis(dim(d), l, radius).unwrap();
            let df = d as f64;
            let lf = l as f64;
            let lambda = lf * (lf + df - 2.0);
            for (a, &j) in s.k_h1.iter().enumerate() {
                for (b, &k) in s.k_h1.iter().enumerate() {
                    let (aj, ak) = (s.alpha(j), s.alpha(k));
                    let ext = quad_exterior(
                        |r| {
                            let fj = (r / radius).powf(aj);
                            let fk = (r / radius).powf(ak);
                            (aj * ak / (r * r) + lambda / (r * r)) * fj * fk * r.powf(df - 1.0)
                        },
                        radius,
                    );
                    let int = quad(
                        |r| {
                            let f = (r / radius).powf(2.0 * lf);
                            (lf * lf + lambda) * f / (r * r) * r.powf(df - 1.0)
                        },
                        0.0,
                        radius,
                        64,
                    );
                    let q = ext + int;
                    assert!((q - s.gram_h1[a][b]).abs() < 1e-8 * q.abs(), "d={d} l={l} R={radius} ({j},{k})");
                }
            }
            for (a, &j) in s.k_l2.iter().enumerate() {
                for (b, &k) in s.k_l2.iter().enumerate() {
                    let q = quad_exterior(|r| r.powf(s.alpha(j) + s.alpha(k) + df - 1.0), radius);
                    assert!((q - s.gram_l2[a][b]).abs() < 1e-8 * q.abs(), "d={d} l={l} ({j},{k})");
                }
            }
        }
    }
}

fn grid() -> Grid {
    Grid::new(2048, 32.0).unwrap()
}

fn member_state(spec: &PlrBasisSpec, k: usize, slot: Slot, mode: ModeIndex, g: Grid) -> CauchyData {
    let p = spec.materialize_member(k, slot, mode, g).unwrap();
    let z = RadialProfile::zeros(mode, g);
    match slot {
        Slot::Field => CauchyData::single(p, z).unwrap(),
        Slot::Velocity => CauchyData::single(z, p).unwrap(),
    }
}

#[test]
fn members_are_non_radiative_and_match_closed_gram() {
    let g = grid();
    for (d, l) in CASES {
        let mode = ModeIndex::new(d, l, 0).unwrap();
        let spec = plr_basis(dim(d), l, 1.0).unwrap();
        for slot in [Slot::Field, Slot::Velocity] {
            for (a, &k) in spec.indices(slot).iter().enumerate() {
                let s = member_state(&spec, k, slot, mode, g);
                let rep = is_nonradiative_linear(&s, 1.0).unwrap();
                assert!(rep.member, "d={d} l={l} k={k} {slot:?}: {rep:?}");
                assert!(rep.exterior_energy <= 1e-12 * rep.norm_sq);
                assert!(rep.projection_residual <= 1e-10 * rep.norm_sq.sqrt());
                let closed = spec.gram(slot)[a][a];
                assert!((rep.norm_sq - closed).abs() < 2e-3 * closed, "d={d} l={l} k={k}: {} vs {closed}", rep.norm_sq);
            }
        }
    }
}

#[test]
fn radial_f0_has_the_expected_profile_and_norm() {
    let g = grid();
    let mode = ModeIndex::radial(dim(3));
    let spec = plr_basis(dim(3), 0, 1.0).unwrap();
    let p = spec.materialize_member(0, Slot::Field, mode, g).unwrap();
    // Mode-normalized: the function min(1, 1/r) has Ḣ¹ norm² 4π.
    assert!((p.h1_norm_sq() - 1.0).abs() < 1e-12);
    let phys = hankel_inverse(&p).physical.unwrap();
    let h = g.step();
    let werr: f64 = g.r_nodes().into_iter().zip(&phys).map(|(r, v)| h * (r * (v - (1.0f64).min(1.0 / r))).powi(2)).sum();
    let far = g.r_nodes().into_iter().zip(&phys).filter(|(r, _)| (r - 1.0).abs() > 0.25 && *r > 0.25).map(|(r, v)| (v - (1.0f64).min(1.0 / r)).abs()).fold(0.0, f64::max);
    // ∂_s T f_0 jumps at ±R, so the physical view carries a small Gibbs ripple.
    assert!(werr.sqrt() < 1e-3 && far < 1e-3, "{werr:e} {far:e}");
    let spec5 = plr_basis(dim(5), 0, 2.0).unwrap();
    let g0 = spec5.materialize_member(0, Slot::Velocity, ModeIndex::radial(dim(5)), g).unwrap();
    assert!((g0.l2_norm_sq() - 0.5).abs() < 1e-12);
}

#[test]
fn static_tail_leaves_the_cone_like_r_over_t() {
    // f_0 is harmonic outside the ball, so the evolution is static there and
    // the energy between t + R and the grid end L is R² (1/(t + R) - 1/L).
    let g = grid();
    let mode = ModeIndex::radial(dim(3));
    let spec = plr_basis(dim(3), 0, 1.0).unwrap();
    let s = member_state(&spec, 0, Slot::Field, mode, g);
    let e = exterior_energy::exterior_energy_measure(&s, 1.0, &[5.0, 10.0, 20.0]).unwrap();
    for m in &e.measured {
        let exact = 1.0 / (m.time + 1.0) - 1.0 / g.extent();
        assert!((m.value - exact).abs() < 1e-3 * exact, "t={}: {} vs {exact}", m.time, m.value);
    }
}

/// Polynomial bump of smoothness C^7 on [a, b].
fn bump(r: f64, a: f64, b: f64) -> f64 {
    if r <= a || r >= b {
        return 0.0;
    }
    (4.0 * (r - a) * (b - r) / ((b - a) * (b - a))).powi(8)
}

fn smooth_state(mode: ModeIndex, g: Grid, params: &[f64]) -> CauchyData {
    let slot = |off: usize| {
        let p = &params[off..off + 4];
        let a = 0.1 + 2.0 * p[0].abs();
        let b = a + 0.8 + 2.0 * p[1].abs();
        let v: Vec<f64> = g.r_nodes().into_iter().map(|r| p[2] * bump(r, a, b) * (1.0 + p[3] * r).cos()).collect();
        hankel_forward(&RadialProfile::zeros(mode, g).with_physical(v).unwrap()).unwrap()
    };
    CauchyData::single(slot(0), slot(4)).unwrap()
}

#[test]
fn projection_fixes_members_and_compact_states() {
    let g = grid();
    let mode = ModeIndex::radial(dim(3));
    let spec = plr_basis(dim(3), 0, 1.0).unwrap();
    let f0 = member_state(&spec, 0, Slot::Field, mode, g);
    let e = project_pr(&f0, 1.0).unwrap();
    let c = e.coefficients[&mode].field[0];
    assert_eq!(c.0, 0);
    assert!((c.1 - 1.0).abs() < 1e-12);
    assert!(e.compact.norm_h() < 1e-10);
    let back = materialize(&e).unwrap();
    assert!(back.combine(1.0, &f0, -1.0).unwrap().norm_h() < 1e-10);

    let compact = smooth_state(mode, g, &[0.05, 0.0, 1.0, 0.3, 0.1, 0.0, -0.7, 2.0]);
    let e = project_pr(&compact, 1.5).unwrap();
    let diff = e.compact.combine(1.0, &compact, -1.0).unwrap().norm_h();
    assert!(diff < 1e-8 * compact.norm_h(), "{diff:e}");
    assert!(e.coefficients[&mode].field[0].1.abs() < 1e-8);
}

#[test]
fn projection_of_shell_velocity() {
    let g = grid();
    let mode = ModeIndex::radial(dim(3));
    let c = (4.0 * std::f64::consts::PI).sqrt();
    let v: Vec<f64> = g.r_nodes().into_iter().map(|r| if (1.0..2.0).contains(&r) { c } else { 0.0 }).collect();
    let v = hankel_forward(&RadialProfile::zeros(mode, g).with_physical(v).unwrap()).unwrap();
    let s = CauchyData::single(RadialProfile::zeros(mode, g), v).unwrap();
    let rep = is_nonradiative_linear(&s, 1.0).unwrap();
    assert!(!rep.member);
    let exact = 14.0 * std::f64::consts::PI / 3.0;
    assert!((rep.exterior_energy - exact).abs() < 1e-4 * exact);
    // The whole velocity lies outside the cone, so nothing survives the projection.
    assert!(pi_r(&s, 1.0).unwrap().norm_h() < 1e-10 * s.norm_h());
}

#[test]
fn bad_radius_is_rejected() {
    assert!(matches!(plr_basis(dim(3), 0, 0.0), Err(PlrError::Radius(_))));
    let g = Grid::new(64, 1.0).unwrap();
    let spec = plr_basis(dim(3), 0, 2.0).unwrap();
    assert!(matches!(
        spec.materialize_member(0, Slot::Field, ModeIndex::radial(dim(3)), g),
        Err(PlrError::Extent { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn projection_is_an_orthogonal_projector(
        p in prop::collection::vec(-1.0f64..1.0, 16),
        case in 0usize..6,
        radius in 0.5f64..2.0,
    ) {
        let g = Grid::new(512, 16.0).unwrap();
        let (d, l) = CASES[case];
        let mode = ModeIndex::new(d, l, 0).unwrap();
        let u = smooth_state(mode, g, &p[..8]);
        let v = smooth_state(mode, g, &p[8..]);
        let pu = pi_r(&u, radius).unwrap();
        let pv = pi_r(&v, radius).unwrap();
        let nu = u.norm_h().max(1e-300);
        let nv = v.norm_h().max(1e-300);
        let ppu = pi_r(&pu, radius).unwrap();
        prop_assert!(ppu.combine(1.0, &pu, -1.0).unwrap().norm_h() <= 1e-10 * nu);
        let sym = h_inner(&pu, &v).unwrap() - h_inner(&u, &pv).unwrap();
        prop_assert!(sym.abs() <= 1e-8 * nu * nv);
        prop_assert!(pu.norm_h() <= (1.0 + 1e-8) * nu);
        let res = u.combine(1.0, &pu, -1.0).unwrap();
        prop_assert!(h_inner(&res, &pv).unwrap().abs() <= 1e-8 * nu * nv);
        let e = project_pr(&u, radius).unwrap();
        let m = materialize(&e).unwrap();
        prop_assert!(m.combine(1.0, &pu, -1.0).unwrap().norm_h() <= 1e-10 * nu);
        let spec = plr_basis(mode.d, l, radius).unwrap();
        for slot in [Slot::Field, Slot::Velocity] {
            for &k in spec.indices(slot) {
                let b = member_state(&spec, k, slot, mode, g);
                prop_assert!(h_inner(&res, &b).unwrap().abs() <= 1e-8 * nu * b.norm_h());
            }
        }
    }

    #[test]
    fn members_evolve_without_radiating(steps in 1usize..160) {
        // Whole-cell times keep the jump of the light-cone profile on the grid.
        let g = Grid::new(512, 16.0).unwrap();
        let t = steps as f64 * g.step();
        let mode = ModeIndex::new(5, 1, 0).unwrap();
        let spec = plr_basis(mode.d, 1, 1.0).unwrap();
        let s = member_state(&spec, 1, Slot::Field, mode, g);
        let moved = free_propagate(&s, t);
        let e = exterior_energy::exterior_energy_formula(&moved, 1.0 + t).unwrap().formula.unwrap();
        prop_assert!(e <= 1e-12 * s.norm_h().powi(2), "{e:e}");
    }
}
