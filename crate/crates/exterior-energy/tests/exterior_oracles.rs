use std::f64::consts::PI;

use exterior_energy::*;
use field_core::{CauchyData, Dimension, Grid, ModeIndex, RadialProfile, Trajectory};
use lightcone_transform::{radiation_field, RadiationProfile};
use spectral_hankel::{free_propagate, hankel_forward};

fn bump(r: f64, a: f64, b: f64) -> f64 {
    if r <= a || r >= b {
        return 0.0;
    }
    (-1.0 / ((r - a) * (b - r))).exp()
}

fn profile(mode: ModeIndex, grid: Grid, f: impl Fn(f64) -> f64) -> RadialProfile {
    let v: Vec<f64> = grid.r_nodes().into_iter().map(f).collect();
    hankel_forward(&RadialProfile::zeros(mode, grid).with_physical(v).unwrap()).unwrap()
}

fn shell_velocity(grid: Grid) -> CauchyData {
    let mode = ModeIndex::radial(Dimension::Three);
    let c = (4.0 * PI).sqrt();
    let v = profile(mode, grid, |r| if (1.0..2.0).contains(&r) { c } else { 0.0 });
    CauchyData::single(RadialProfile::zeros(mode, grid), v).unwrap()
}

fn bump_state(mode: ModeIndex, grid: Grid, a: f64, b: f64) -> CauchyData {
    let f = profile(mode, grid, |r| bump(r, a, b) * (1.0 + r));
    let v = profile(mode, grid, |r| bump(r, a, b) * (3.0 * r).cos());
    CauchyData::single(f, v).unwrap()
}

#[test]
fn shell_formula_matches_closed_form() {
    let g = Grid::new(4096, 16.0).unwrap();
    let s = shell_velocity(g);
    let e = exterior_energy_formula(&s, 1.0).unwrap();
    let exact = 14.0 * PI / 3.0;
    assert!((e.formula.unwrap() - exact).abs() < 1e-6 * exact, "{}", e.formula.unwrap());
    let e = exterior_energy_formula(&s, 1.5).unwrap();
    let exact = 2.0 * PI * (8.0 - 3.375) / 3.0;
    assert!((e.formula.unwrap() - exact).abs() < 1e-6 * exact);
    assert!((exact - 9.6866).abs() < 1e-4);
    assert_eq!(e.per_mode.len(), 1);
    assert_eq!(e.per_mode[0].field, 0.0);
}

#[test]
fn shell_measurement_matches_finite_time_closed_form() {
    // For t > 2 the exterior energy is 14π/3 + (9π/4)/(t + 1): the outgoing
    // shell plus the boundary value of the static 1/r tail.
    let g = Grid::new(8192, 32.0).unwrap();
    let s = shell_velocity(g);
    let times = [5.0, 10.0, 20.0];
    let e = exterior_energy_measure(&s, 1.0, &times).unwrap();
    for m in &e.measured {
        let exact = 14.0 * PI / 3.0 + 2.25 * PI / (m.time + 1.0);
        assert!((m.value - exact).abs() < 1e-4 * exact, "t={} {} vs {exact}", m.time, m.value);
        assert!((m.forward - m.backward).abs() < 1e-8 * m.value);
    }
    assert!(e.measured.windows(2).all(|w| w[1].value <= w[0].value));
    let lim = e.extrapolated.unwrap();
    assert!((lim - 14.0 * PI / 3.0).abs() < 1e-3 * lim);
}

#[test]
fn compact_data_has_no_exterior_energy() {
    let g = Grid::new(2048, 32.0).unwrap();
    for mode in [ModeIndex::radial(Dimension::Three), ModeIndex::new(3, 1, 0).unwrap(), ModeIndex::new(5, 1, 0).unwrap()] {
        let s = bump_state(mode, g, 0.2, 0.9);
        assert!(exterior_energy_formula(&s, 1.0).unwrap().formula.unwrap() <= 1e-8, "{mode}");
        let e = exterior_energy_measure(&s, 1.0, &[5.0, 10.0, 20.0]).unwrap();
        for m in &e.measured {
            assert!(m.value <= 1e-8, "{mode} t={}: {}", m.time, m.value);
        }
    }
}

#[test]
fn measured_energy_is_monotone_and_approaches_formula() {
    let g = Grid::new(2048, 32.0).unwrap();
    for mode in [ModeIndex::new(3, 1, 0).unwrap(), ModeIndex::radial(Dimension::Five)] {
        let s = bump_state(mode, g, 0.5, 2.5);
        let formula = exterior_energy_formula(&s, 0.5).unwrap().formula.unwrap();
        let e = exterior_energy_measure(&s, 0.5, &[0.0, 2.0, 5.0, 10.0, 20.0]).unwrap();
        for w in e.measured.windows(2) {
            assert!(w[1].forward <= w[0].forward + 1e-8 && w[1].backward <= w[0].backward + 1e-8, "{mode}");
        }
        let last = e.measured_last().unwrap();
        assert!(last >= formula - 1e-6 * formula);
        assert!((last - formula).abs() < 1e-2 * formula, "{mode}: {last} vs {formula}");
    }
}

#[test]
fn zero_state_and_bad_inputs() {
    let g = Grid::new(256, 16.0).unwrap();
    let z = CauchyData::empty(Dimension::Three, g);
    assert_eq!(exterior_energy_formula(&z, 1.0).unwrap().formula, Some(0.0));
    let e = exterior_energy_measure(&z, 1.0, &[1.0, 2.0]).unwrap();
    assert!(e.measured.iter().all(|m| m.value == 0.0));
    assert!(matches!(exterior_energy_formula(&z, -1.0), Err(ExteriorError::Radius(_))));
    assert!(matches!(exterior_energy_measure(&z, 1.0, &[20.0]), Err(ExteriorError::Coverage { .. })));
}

#[test]
fn per_mode_contributions_add() {
    let g = Grid::new(1024, 16.0).unwrap();
    let a = bump_state(ModeIndex::new(3, 1, 0).unwrap(), g, 0.5, 2.0);
    let b = bump_state(ModeIndex::new(3, 2, 3).unwrap(), g, 1.0, 2.5);
    let sum = a.combine(1.0, &b, 1.0).unwrap();
    let ea = exterior_energy_formula(&a, 1.0).unwrap().formula.unwrap();
    let eb = exterior_energy_formula(&b, 1.0).unwrap().formula.unwrap();
    let es = exterior_energy_formula(&sum, 1.0).unwrap();
    assert!((es.formula.unwrap() - ea - eb).abs() < 1e-12 * (ea + eb));
    let total: f64 = es.per_mode.iter().map(ModeEnergy::total).sum();
    assert_eq!(total, es.formula.unwrap());
}

fn trajectory(s: &CauchyData, times: &[f64]) -> Trajectory {
    Trajectory::new(times.to_vec(), times.iter().map(|t| free_propagate(s, *t)).collect()).unwrap()
}

#[test]
fn radiation_asymptotics_converge() {
    let g = Grid::new(2048, 32.0).unwrap();
    let times = [5.0, 10.0, 20.0];
    // Radial d = 3 data radiate exactly along rays once the cone has cleared the
    // support; what is left is the spectral-derivative leakage of the sampled bump.
    let s = bump_state(ModeIndex::radial(Dimension::Three), g, 0.5, 2.5);
    let f = radiation_field(&s).unwrap();
    let tr = trajectory(&s, &times);
    for t in times {
        let d = radiation_asymptotics_check(&tr, &f, t).unwrap();
        let far = radiation_asymptotics_check(&tr, &RadiationProfile::empty(f.dim, g), t).unwrap();
        assert!(d < 1e-5 * far, "t={t}: {d} vs far {far}");
    }
    for mode in [ModeIndex::new(3, 1, 0).unwrap(), ModeIndex::radial(Dimension::Five)] {
        let s = bump_state(mode, g, 0.5, 2.5);
        let f = radiation_field(&s).unwrap();
        let tr = trajectory(&s, &times);
        let d: Vec<f64> = times.iter().map(|t| radiation_asymptotics_check(&tr, &f, *t).unwrap()).collect();
        assert!(d[1] < d[0] && d[2] < d[1], "{mode}: {d:?}");
        // Mismatched profile: the discrepancy is the full far-field velocity.
        let none = RadiationProfile::empty(mode.d, g);
        let far = radiation_asymptotics_check(&tr, &none, 20.0).unwrap();
        assert!(far > 10.0 * d[2], "{mode}");
    }
}
