use std::collections::BTreeMap;

use field_core::{norm_n, norm_w, CauchyData, Dimension, Grid, ModeIndex, RadialProfile, Slot, SourceTerm, Trajectory};
use lightcone_transform::radiation_field;
use nonlinear_flow::*;
use plr_space::plr_basis;
use proptest::prelude::*;
use spectral_hankel::{hankel_forward, hankel_inverse};

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

fn profile(grid: Grid, f: impl Fn(f64) -> f64) -> RadialProfile {
    let v: Vec<f64> = grid.r_nodes().into_iter().map(f).collect();
    hankel_forward(&RadialProfile::zeros(radial3(), grid).with_physical(v).unwrap()).unwrap()
}

fn small_cfg() -> PicardConfig {
    PicardConfig { window: 10.0, dt: 0.05, ..PicardConfig::default() }
}

fn f0_unit(grid: Grid) -> CauchyData {
    let f0 = plr_basis(Dimension::Three, 0, 1.0).unwrap().materialize_member(0, Slot::Field, radial3(), grid).unwrap();
    let s = CauchyData::single(f0, RadialProfile::zeros(radial3(), grid)).unwrap();
    s.scaled(1.0 / s.norm_h())
}

fn bump_data(grid: Grid) -> CauchyData {
    let s = CauchyData::single(profile(grid, |r| poly_bump(r, 2.0, 1.0)), profile(grid, |r| poly_bump(r, 1.5, 1.0) * r)).unwrap();
    s.scaled(1.0 / s.norm_h())
}

fn viewed(s: CauchyData) -> CauchyData {
    spectral_hankel::with_physical(&s)
}

fn constant_trajectory(grid: Grid, v: impl Fn(f64) -> f64) -> Trajectory {
    let p = RadialProfile::zeros(radial3(), grid).with_physical(grid.r_nodes().into_iter().map(v).collect()).unwrap();
    let s = CauchyData::single(hankel_forward(&p).unwrap(), RadialProfile::zeros(radial3(), grid)).unwrap();
    let s = CauchyData { modes: s.modes.into_iter().map(|(m, mut x)| { x.field.physical = p.physical.clone(); (m, x) }).collect(), ..s };
    Trajectory::new(vec![0.0, 1.0], vec![s.clone(), s]).unwrap()
}

#[test]
fn exponent_and_oddness() {
    let three = NonlinearityConfig::defocusing(Dimension::Three);
    let five = NonlinearityConfig::focusing(Dimension::Five);
    assert_eq!(three.q, 5.0);
    assert!((five.q - 7.0 / 3.0).abs() < 1e-15);
    for x in [-2.0, -0.3, 0.0, 0.7, 1.9] {
        for cfg in [three, five] {
            assert_eq!(cfg.f(-x), -cfg.f(x));
            assert!((cfg.f(x).abs() - x.abs().powf(cfg.q)).abs() < 1e-14);
        }
    }
    assert_eq!(three.f(2.0), -32.0);
}

#[test]
fn zero_trajectory_gives_zero_source() {
    let g = Grid::new(128, 16.0).unwrap();
    let tr = constant_trajectory(g, |_| 0.0);
    let h = evaluate_nonlinearity(&tr, &NonlinearityConfig::focusing(Dimension::Three)).unwrap();
    assert_eq!(norm_n(&h), 0.0);
}

#[test]
fn constant_patch_gives_the_fifth_power() {
    // The radial coefficient v stands for u = v Y_0 with Y_0 = |S²|^{-1/2}.
    let g = Grid::new(256, 16.0).unwrap();
    let y0 = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
    let c = 0.3;
    let tr = constant_trajectory(g, |r| if (2.0..4.0).contains(&r) { c / y0 } else { 0.0 });
    let nl = NonlinearityConfig::focusing(Dimension::Three);
    let h = evaluate_nonlinearity(&tr, &nl).unwrap();
    let p = &h.values[0][&radial3()];
    let back = hankel_inverse(p).physical.unwrap();
    for (j, r) in g.r_nodes().into_iter().enumerate() {
        if (2.2..3.8).contains(&r) {
            assert!((p.physical.as_ref().unwrap()[j] * y0 - c.powi(5)).abs() < 1e-15);
            assert!((back[j] * y0 - c.powi(5)).abs() < 1e-12, "r={r}");
        }
    }
}

#[test]
fn non_radial_input_is_rejected() {
    let g = Grid::new(64, 8.0).unwrap();
    let mode = ModeIndex::new(3, 1, 0).unwrap();
    let z = RadialProfile::zeros(mode, g).with_physical(vec![0.0; 64]).unwrap();
    let s = CauchyData::single(z.clone(), z).unwrap();
    let tr = Trajectory::new(vec![0.0], vec![s.clone()]).unwrap();
    let nl = NonlinearityConfig::focusing(Dimension::Three);
    assert!(matches!(evaluate_nonlinearity(&tr, &nl), Err(NonlinearError::NonRadial)));
    assert!(matches!(phi_map(&s, 1.0, &nl, &small_cfg()), Err(NonlinearError::NonRadial)));
}

#[test]
fn zero_data_is_a_fixed_point() {
    let g = Grid::new(256, 32.0).unwrap();
    let z = CauchyData::single(RadialProfile::zeros(radial3(), g), RadialProfile::zeros(radial3(), g)).unwrap();
    let res = phi_map(&z, 1.0, &NonlinearityConfig::defocusing(Dimension::Three), &small_cfg()).unwrap();
    assert_eq!(res.phi.norm_h(), 0.0);
    assert!(res.report.converged);
    assert_eq!(res.report.final_residual, 0.0);
}

#[test]
fn phi_on_a_plr_member() {
    let g = Grid::new(512, 32.0).unwrap();
    let data = f0_unit(g).scaled(0.05);
    let nl = NonlinearityConfig::defocusing(Dimension::Three);
    let res = phi_map(&data, 1.0, &nl, &small_cfg()).unwrap();
    let rep = &res.report;
    assert!(rep.converged);
    assert!(rep.ratios.iter().all(|&q| q < 6e-6), "{:?}", rep.ratios);
    let checks = phi_checks(&res, 1.0, nl.q, &[4.0, 8.0]).unwrap();
    assert!(checks.pi_r_ok, "{}", checks.pi_r_residual);
    assert!(checks.distance > 0.0 && checks.distance <= 1e-2 * 0.05f64.powi(5), "{}", checks.distance);
    // The exterior energy is the static tail of f_0 cut off at the box, c² R² (1/(t+R) - 1/L).
    for m in &checks.exterior.measured {
        let tail = 0.05f64.powi(2) * (1.0 / (m.time + 1.0) - 1.0 / 32.0);
        assert!((m.value - tail).abs() < 1e-2 * tail, "t={} {} vs {tail}", m.time, m.value);
    }
}

#[test]
fn phi_scales_with_the_critical_power() {
    let g = Grid::new(512, 32.0).unwrap();
    let unit = bump_data(g);
    let nl = NonlinearityConfig::focusing(Dimension::Three);
    let sizes = [0.025, 0.05, 0.1];
    let dist: Vec<f64> = sizes
        .iter()
        .map(|&s| {
            let res = phi_map(&unit.scaled(s), 1.0, &nl, &small_cfg()).unwrap();
            res.phi.combine(1.0, &res.data, -1.0).unwrap().norm_h()
        })
        .collect();
    let slope = (dist[2] / dist[0]).ln() / (sizes[2] / sizes[0]).ln();
    assert!((slope - 5.0).abs() < 0.3, "slope {slope}");
}

#[test]
fn phi_is_odd() {
    let g = Grid::new(256, 32.0).unwrap();
    let data = bump_data(g).scaled(0.2);
    let nl = NonlinearityConfig::focusing(Dimension::Three);
    let cfg = small_cfg();
    let a = phi_map(&data, 1.0, &nl, &cfg).unwrap().phi;
    let b = phi_map(&data.scaled(-1.0), 1.0, &nl, &cfg).unwrap().phi;
    let d = a.combine(1.0, &b, 1.0).unwrap().norm_h();
    assert!(d <= 1e-10 * a.norm_h(), "{d}");
}

#[test]
fn large_data_reports_divergence() {
    let g = Grid::new(256, 32.0).unwrap();
    let data = bump_data(g).scaled(200.0);
    let nl = NonlinearityConfig::focusing(Dimension::Three);
    let cfg = PicardConfig { max_iter: 6, ..small_cfg() };
    match phi_map(&data, 1.0, &nl, &cfg) {
        Err(NonlinearError::Divergence(rep)) => assert!(!rep.converged && rep.iterations > 0),
        other => panic!("expected divergence, got {:?}", other.map(|r| r.report)),
    }
}

#[test]
fn epsilon_calibration_brackets_the_threshold() {
    let g = Grid::new(128, 16.0).unwrap();
    let unit = bump_data(g);
    let nl = NonlinearityConfig::focusing(Dimension::Three);
    let cfg = PicardConfig { window: 4.0, dt: 0.1, max_iter: 12, ..PicardConfig::default() };
    let eps = calibrate_epsilon(&unit, 1.0, &nl, &cfg, 0.05, 200.0, 6).unwrap();
    assert!(eps > 0.05 && eps < 200.0, "{eps}");
    assert!(phi_map(&unit.scaled(eps), 1.0, &nl, &cfg).is_ok());
}

#[test]
fn backward_duhamel_is_the_remainder() {
    let g = Grid::new(256, 16.0).unwrap();
    let times: Vec<f64> = (0..=40).map(|i| -1.0 + 0.05 * i as f64).collect();
    let p = profile(g, |r| poly_bump(r, 2.0, 1.0));
    let values = times
        .iter()
        .map(|&t| BTreeMap::from([(radial3(), p.scaled(poly_bump(t, 0.0, 1.0)))]))
        .collect();
    let h = SourceTerm::new(Dimension::Three, g, times, values, (-1.0, 1.0)).unwrap();
    let w = backward_duhamel(&h).unwrap();
    let rem = duhamel_engine::extract_scattering(&h).unwrap().remainder;
    let scale = rem.states.iter().map(CauchyData::norm_h).fold(0.0, f64::max);
    for (a, b) in w.iter().zip(&rem.states) {
        assert!(a.combine(1.0, b, -1.0).unwrap().norm_h() <= 1e-10 * scale);
    }
    assert!(w.last().unwrap().norm_h() <= 1e-12 * scale);
}

fn small_radiation(grid: Grid, size: f64) -> lightcone_transform::RadiationProfile {
    let s = CauchyData::single(profile(grid, |r| poly_bump(r, 3.0, 2.0)), profile(grid, |r| poly_bump(r, 2.5, 1.5))).unwrap();
    let f = radiation_field(&s).unwrap();
    let n = f.norm_sq().sqrt();
    let mut out = f.clone();
    for v in out.modes.values_mut() {
        v.iter_mut().for_each(|x| *x *= size / n);
    }
    out
}

#[test]
fn wave_operator_of_zero_is_zero() {
    let g = Grid::new(256, 32.0).unwrap();
    let f = small_radiation(g, 1.0);
    let mut zero = f.clone();
    zero.modes.values_mut().for_each(|v| v.iter_mut().for_each(|x| *x = 0.0));
    let res = wave_operator(&zero, 0.0, &NonlinearityConfig::defocusing(Dimension::Three), &small_cfg()).unwrap();
    assert!(res.trajectory.states.iter().all(|s| s.norm_h() == 0.0));
}

#[test]
fn wave_operator_for_small_radiation() {
    let g = Grid::new(1024, 64.0).unwrap();
    let f = small_radiation(g, 0.05);
    let nl = NonlinearityConfig::defocusing(Dimension::Three);
    let cfg = PicardConfig { window: 30.0, ..PicardConfig::default() };
    let res = wave_operator(&f, 0.0, &nl, &cfg).unwrap();
    assert!(res.report.converged);
    let checks = wave_operator_checks(&res, &f, &[5.0, 10.0, 20.0]).unwrap();
    assert!(checks.distances_decreasing, "{:?}", checks.distances);
    assert!(checks.distances[2] <= 1e-3 * 0.05, "{:?}", checks.distances);
    assert!(checks.asymptotics_decreasing, "{:?}", checks.asymptotics);
}

#[test]
fn start_time_search_finds_a_window() {
    let g = Grid::new(256, 32.0).unwrap();
    let f = small_radiation(g, 1.0);
    let cfg = PicardConfig { window: 20.0, ..PicardConfig::default() };
    let full = find_start_time(&f, f64::INFINITY, &cfg, 1.0).unwrap();
    assert_eq!(full, Some(0.0));
    let data = lightcone_transform::invert_radiation(&f).unwrap();
    let times: Vec<f64> = (0..=400).map(|i| 0.05 * i as f64).collect();
    let states = times.iter().map(|&t| viewed(spectral_hankel::free_propagate(&data, t))).collect();
    let whole = norm_w(&Trajectory::new(times, states).unwrap()).unwrap();
    let t = find_start_time(&f, 0.5 * whole, &cfg, 1.0).unwrap().expect("W-norm decays on the window");
    assert!(t > 0.0);
    assert!(find_start_time(&f, 0.0, &cfg, 1.0).unwrap().is_none());
}

#[test]
fn picard_csv_has_one_row_per_iteration() {
    let g = Grid::new(256, 32.0).unwrap();
    let res = phi_map(&bump_data(g).scaled(0.1), 1.0, &NonlinearityConfig::focusing(Dimension::Three), &small_cfg()).unwrap();
    let csv = res.report.to_csv();
    assert_eq!(csv.lines().count(), res.report.iterations + 1);
    assert!(csv.starts_with("iteration,x_difference,ratio"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn nonlinear_estimate_holds_with_a_moderate_constant(a in 0.1f64..2.0, b in 0.1f64..2.0, c in 1.0f64..4.0) {
        // ‖f(u) - f(v)‖_N ≤ C ‖u - v‖_W (‖u‖_W^{q-1} + ‖v‖_W^{q-1}) on two-slice trajectories.
        let g = Grid::new(128, 16.0).unwrap();
        let u = constant_trajectory(g, |r| a * poly_bump(r, c, 1.0));
        let v = constant_trajectory(g, |r| b * poly_bump(r, c + 0.5, 1.5));
        let nl = NonlinearityConfig::focusing(Dimension::Three);
        let hu = evaluate_nonlinearity(&u, &nl).unwrap();
        let hv = evaluate_nonlinearity(&v, &nl).unwrap();
        let lhs = norm_n(&hu.combine(1.0, &hv, -1.0).unwrap());
        let diff: Vec<CauchyData> = u.states.iter().zip(&v.states).map(|(x, y)| viewed(x.combine(1.0, y, -1.0).unwrap())).collect();
        let dw = norm_w(&Trajectory::new(u.times.clone(), diff).unwrap()).unwrap();
        let (wu, wv) = (norm_w(&u).unwrap(), norm_w(&v).unwrap());
        let constant = lhs / (dw * (wu.powi(4) + wv.powi(4)));
        prop_assert!(constant.is_finite() && constant < 1e3, "C = {}", constant);
    }
}
