//! The property suite behind `verify-suite`. Each criterion returns named
//! checks and metrics; nothing time-dependent is recorded so reports are
//! reproducible byte for byte.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use duhamel_engine::{nonradiative_source_solve, SolveConfig};
use exterior_energy::{exterior_energy_formula, exterior_energy_measure};
use field_core::{h_inner, norm_n, CauchyData, Dimension, Grid, ModeIndex, RadialProfile, Slot};
use lightcone_transform::{apply_T, apply_dsT, invert_radiation, radiation_field, RadiationProfile};
use nonlinear_flow::{phi_checks, phi_map, wave_operator, wave_operator_checks, NonlinearityConfig, PicardConfig};
use plr_space::{is_nonradiative_linear, pi_r, plr_basis, PlrBasisSpec};

use crate::profiles::{poly_bump, profile, random_source, random_state};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub checks: BTreeMap<String, bool>,
    pub metrics: BTreeMap<String, f64>,
}

impl CriterionResult {
    fn new(id: u8, name: &'static str) -> Self {
        Self { id, name, passed: true, checks: BTreeMap::new(), metrics: BTreeMap::new() }
    }

    fn check(&mut self, name: &str, ok: bool) {
        self.passed &= ok;
        let e = self.checks.entry(name.into()).or_insert(true);
        *e &= ok;
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    /// Keeps the largest value seen under `name`.
    fn worst(&mut self, name: &str, value: f64) {
        let e = self.metrics.entry(name.into()).or_insert(f64::NEG_INFINITY);
        *e = e.max(value);
    }

    /// Failing checks, by name.
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, ok)| !**ok).map(|(n, _)| n.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

pub type CriterionFn = fn(u64) -> Result<CriterionResult, CliError>;

pub const CRITERIA: [(u8, &str, CriterionFn); 10] = [
    (1, "T isometry", isometry),
    (2, "range parity", range_parity),
    (3, "radiation map bijection", bijection),
    (4, "exterior energy identity", exterior_identity),
    (5, "finite speed", finite_speed),
    (6, "P_L(R) consistency", plr_consistency),
    (7, "pi_R projector", projector),
    (8, "non-radiative source solve", nonradiative_solve),
    (9, "Phi slice", phi_slice),
    (10, "wave operator slice", wave_operator_slice),
];

pub fn run_suite(seed: u64) -> Result<SuiteReport, CliError> {
    let criteria = CRITERIA.iter().map(|(_, _, f)| f(seed)).collect::<Result<Vec<_>, _>>()?;
    Ok(SuiteReport { seed, passed: criteria.iter().all(|c| c.passed), criteria })
}

/// Independent stream per criterion.
fn rng(seed: u64, id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(u64::from(id)))
}

fn dim(d: u32) -> Dimension {
    Dimension::new(d).expect("odd dimension")
}

fn mode(d: u32, l: u32) -> ModeIndex {
    ModeIndex::new(d, l, 0).expect("valid mode")
}

fn exp_bump(r: f64, a: f64, b: f64) -> f64 {
    if r <= a || r >= b {
        return 0.0;
    }
    (-1.0 / ((r - a) * (b - r))).exp()
}

const SUITE_MODES: [(u32, u32); 5] = [(3, 0), (3, 1), (3, 2), (5, 0), (5, 1)];

fn suite_grid() -> Grid {
    Grid::new(2048, 16.0).expect("grid")
}

/// Ten smooth compact profiles with different centres, widths and oscillation.
fn profile_suite(m: ModeIndex, grid: Grid) -> Result<Vec<RadialProfile>, CliError> {
    (0..10)
        .map(|i| {
            let a = 0.2 + 0.3 * i as f64;
            let b = a + 1.0 + 0.25 * (i % 4) as f64;
            let k = 0.7 * i as f64;
            profile(m, grid, move |r| exp_bump(r, a, b) * (1.0 + 0.5 * (k * r).cos()))
        })
        .collect()
}

/// ∫ |v|² r^{d-1} dr by the midpoint rule on the physical view.
fn physical_l2(p: &RadialProfile) -> f64 {
    let g = p.grid;
    let e = f64::from(p.mode.d.value()) - 1.0;
    let v = p.physical.as_ref().expect("profiles carry their physical view");
    g.r_nodes().into_iter().zip(v).map(|(r, x)| g.step() * x * x * r.powf(e)).sum::<f64>().sqrt()
}

fn isometry(_seed: u64) -> Result<CriterionResult, CliError> {
    let mut out = CriterionResult::new(1, "T isometry");
    let g = suite_grid();
    for (d, l) in SUITE_MODES {
        let tol = if d == 3 { 1e-6 } else { 1e-3 };
        let m = mode(d, l);
        for p in profile_suite(m, g)? {
            let phys = physical_l2(&p);
            let rel = (apply_T(&p)?.norm_sq().sqrt() - phys).abs() / phys;
            out.worst(&format!("isometry_d{d}_l{l}"), rel);
            out.check(&format!("d{d}"), rel <= tol);
        }
    }
    Ok(out)
}

fn range_parity(_seed: u64) -> Result<CriterionResult, CliError> {
    let mut out = CriterionResult::new(2, "range parity");
    let g = suite_grid();
    for (d, l) in SUITE_MODES {
        let m = mode(d, l);
        for p in profile_suite(m, g)? {
            for f in [apply_T(&p)?, apply_dsT(&p)?] {
                let peak = f.modes.values().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
                let rel = f.parity_defect() / peak;
                out.worst("parity_defect", rel);
                out.check("parity", rel <= 1e-10);
            }
        }
    }
    Ok(out)
}

fn bijection(_seed: u64) -> Result<CriterionResult, CliError> {
    let mut out = CriterionResult::new(3, "radiation map bijection");
    let g = suite_grid();
    for (d, l) in SUITE_MODES {
        let m = mode(d, l);
        let ps = profile_suite(m, g)?;
        for i in 0..5 {
            let state = CauchyData::single(ps[i].clone(), ps[9 - i].scaled(0.7))?;
            let f = radiation_field(&state)?;
            let n2 = state.norm_h().powi(2);
            let iso = (f.norm_sq() - n2).abs() / n2;
            out.worst("isometry", iso);
            out.check("isometry", iso <= 1e-5);
            let back = invert_radiation(&f)?;
            let err = back.combine(1.0, &state, -1.0)?.norm_h() / state.norm_h();
            out.worst("data_round_trip", err);
            out.check("data_round_trip", err <= 1e-4);
        }
        // A profile with no parity, prescribed directly on the line.
        let mut f = RadiationProfile::empty(m.d, g);
        let samples = g.s_nodes().into_iter().map(|s| exp_bump(s, -1.5, 3.0) * (1.0 + 0.4 * s)).collect();
        f.insert(m, samples, 0.0);
        let again = radiation_field(&invert_radiation(&f)?)?;
        let err = again.combine(1.0, &f, -1.0)?.norm_sq().sqrt() / f.norm_sq().sqrt();
        out.worst("radiation_round_trip", err);
        out.check("radiation_round_trip", err <= 1e-4);
    }
    Ok(out)
}

fn shell(grid: Grid) -> Result<CauchyData, CliError> {
    let m = ModeIndex::radial(dim(3));
    let c = (4.0 * PI).sqrt();
    let v = profile(m, grid, |r| if (1.0..2.0).contains(&r) { c } else { 0.0 })?;
    Ok(CauchyData::single(RadialProfile::zeros(m, grid), v)?)
}

fn exterior_identity(_seed: u64) -> Result<CriterionResult, CliError> {
    let mut out = CriterionResult::new(4, "exterior energy identity");
    let g = Grid::new(8192, 32.0)?;
    let s = shell(g)?;
    let exact = 14.0 * PI / 3.0;
    let formula = exterior_energy_formula(&s, 1.0)?.formula.unwrap_or(0.0);
    let formula_rel = (formula - exact).abs() / exact;
    out.metric("formula", formula);
    out.metric("formula_rel", formula_rel);
    out.check("formula", formula_rel <= 1e-6);
    let measured = exterior_energy_measure(&s, 1.0, &[20.0])?.measured_last().unwrap_or(f64::NAN);
    let measured_rel = (measured - formula).abs() / formula;
    out.metric("measured_t20", measured);
    out.metric("measured_rel", measured_rel);
    out.check("measured", measured_rel <= 1e-2);
    Ok(out)
}

fn finite_speed(_seed: u64) -> Result<CriterionResult, CliError> {
    let mut out = CriterionResult::new(5, "finite speed");
    let g = Grid::new(2048, 32.0)?;
    let radius = 2.0;
    for (d, l) in SUITE_MODES {
        let m = mode(d, l);
        let field = profile(m, g, |r| poly_bump(r, 1.0, 0.9) * (1.0 + r))?;
        let velocity = profile(m, g, |r| poly_bump(r, 1.1, 0.8) * (3.0 * r).cos())?;
        let s = CauchyData::single(field, velocity)?;
        let s = s.scaled(1.0 / s.norm_h());
        let formula = exterior_energy_formula(&s, radius)?.formula.unwrap_or(f64::NAN);
        let measured = exterior_energy_measure(&s, radius, &[5.0, 10.0, 20.0])?;
        let worst = measured.measured.iter().map(|e| e.value).fold(0.0, f64::max);
        out.worst("formula", formula);
        out.worst("measured", worst);
        out.check("formula", formula <= 1e-8);
        out.check("measured", worst <= 1e-8);
    }
    Ok(out)
}

const PLR_CASES: [(u32, u32); 6] = [(3, 0), (3, 1), (3, 2), (5, 0), (5, 1), (5, 2)];

/// k with α_k = 2k + 2 - d - l inside the Ḣ¹ (first) and L² (second) integrability ranges.
fn admissible(d: u32, l: u32) -> (Vec<usize>, Vec<usize>) {
    let (df, lf) = (f64::from(d), f64::from(l));
    let alphas = (0..=(d + l) as usize).map(|k| (k, 2.0 * k as f64 + 2.0 - df - lf));
    let h1 = alphas.clone().filter(|(_, a)| 2.0 * a + df - 2.0 < 0.0).map(|(k, _)| k).collect();
    let l2 = alphas.filter(|(_, a)| 2.0 * a + df < 0.0).map(|(k, _)| k).collect();
    (h1, l2)
}

/// Composite 5-point Gauss–Legendre on [a, b].
fn gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [0.0, 0.538_469_310_105_683_1, -0.538_469_310_105_683_1, 0.906_179_845_938_664, -0.906_179_845_938_664];
    const W: [f64; 5] = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1, 0.236_926_885_056_189_1];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let c = a + (i as f64 + 0.5) * h;
            X.iter().zip(W).map(|(x, w)| w * f(c + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// Ḣ¹ and L² Gram entries of the tails by quadrature, exterior part through r = R/x.
fn gram_by_quadrature(spec: &PlrBasisSpec, d: u32, l: u32, radius: f64, slot: Slot, j: usize, k: usize) -> f64 {
    let (df, lf) = (f64::from(d), f64::from(l));
    let (aj, ak) = (spec.alpha(j), spec.alpha(k));
    let ext = |f: &dyn Fn(f64) -> f64| gauss(|x| if x <= 0.0 { 0.0 } else { f(radius / x) * radius / (x * x) }, 0.0, 1.0, 64);
    match slot {
        Slot::Velocity => ext(&|r| r.powf(aj + ak + df - 1.0)),
        Slot::Field => {
            let lambda = lf * (lf + df - 2.0);
            let outer = ext(&|r| (aj * ak + lambda) / (r * r) * (r / radius).powf(aj + ak) * r.powf(df - 1.0));
            let inner = gauss(|r| (lf * lf + lambda) / (r * r) * (r / radius).powf(2.0 * lf) * r.powf(df - 1.0), 0.0, radius, 64);
            outer + inner
        }
    }
}

fn plr_consistency(_seed: u64) -> Result<CriterionResult, CliError> {
    let mut out = CriterionResult::new(6, "P_L(R) consistency");
    let g = Grid::new(2048, 32.0)?;
    let radius = 1.0;
    for (d, l) in PLR_CASES {
        let spec = plr_basis(dim(d), l, radius)?;
        let (h1, l2) = admissible(d, l);
        out.check("admissible_sets", spec.k_h1 == h1 && spec.k_l2 == l2);
        let m = mode(d, l);
        for slot in [Slot::Field, Slot::Velocity] {
            let idx = spec.indices(slot).to_vec();
            for (a, &j) in idx.iter().enumerate() {
                for (b, &k) in idx.iter().enumerate() {
                    let q = gram_by_quadrature(&spec, d, l, radius, slot, j, k);
                    let rel = (q - spec.gram(slot)[a][b]).abs() / q.abs();
                    out.worst("gram_rel", rel);
                    out.check("gram", rel <= 1e-8);
                }
                let p = spec.materialize_member(j, slot, m, g)?;
                let z = RadialProfile::zeros(m, g);
                let s = match slot {
                    Slot::Field => CauchyData::single(p, z)?,
                    Slot::Velocity => CauchyData::single(z, p)?,
                };
                let rep = is_nonradiative_linear(&s, radius)?;
                out.check("members_nonradiative", rep.member);
                let n2 = s.norm_h().powi(2);
                let measured = exterior_energy_measure(&s, radius, &[20.0])?.measured_last().unwrap_or(f64::NAN) / n2;
                out.worst("measured_t20_rel", measured);
                out.check("members_measured", measured <= 1e-4);
            }
        }
    }
    Ok(out)
}

fn projector(seed: u64) -> Result<CriterionResult, CliError> {
    let mut out = CriterionResult::new(7, "pi_R projector");
    let mut rng = rng(seed, 7);
    let g = Grid::new(512, 16.0)?;
    for _ in 0..50 {
        let (d, l) = PLR_CASES[rng.gen_range(0..PLR_CASES.len())];
        let m = mode(d, l);
        let radius = rng.gen_range(0.5..2.0);
        let u = random_state(&mut rng, m, g)?;
        let v = random_state(&mut rng, m, g)?;
        let (pu, pv) = (pi_r(&u, radius)?, pi_r(&v, radius)?);
        let (nu, nv) = (u.norm_h(), v.norm_h());
        let idem = pi_r(&pu, radius)?.combine(1.0, &pu, -1.0)?.norm_h() / nu;
        let sym = (h_inner(&pu, &v)? - h_inner(&u, &pv)?).abs() / (nu * nv);
        let res = u.combine(1.0, &pu, -1.0)?;
        let orth = h_inner(&res, &pv)?.abs() / (nu * nv);
        let expansion = pu.norm_h() / nu;
        out.worst("idempotence", idem);
        out.worst("symmetry", sym);
        out.worst("orthogonality", orth);
        out.worst("norm_ratio", expansion);
        out.check("idempotence", idem <= 1e-10);
        out.check("symmetry", sym <= 1e-8);
        out.check("orthogonality", orth <= 1e-8);
        out.check("non_expansive", expansion <= 1.0 + 1e-12);
    }
    Ok(out)
}

fn nonradiative_solve(seed: u64) -> Result<CriterionResult, CliError> {
    let mut out = CriterionResult::new(8, "non-radiative source solve");
    let mut rng = rng(seed, 8);
    let g = Grid::new(768, 48.0)?;
    for _ in 0..5 {
        let h = random_source(&mut rng, dim(3), g, 0.05)?;
        let h = h.combine(1.0 / norm_n(&h), &h, 0.0)?;
        let sol = nonradiative_source_solve(&h, 1.0, &SolveConfig::default())?;
        let rep = sol.report.as_ref().expect("solve attaches a report");
        out.worst("residual", rep.residual);
        out.worst("exterior_energy", rep.forward_energy.max(rep.backward_energy));
        let measured = rep.measured.measured_last().unwrap_or(f64::NAN);
        let formula = 0.5 * (rep.forward_energy + rep.backward_energy);
        out.worst("measured_rel", (measured - formula).abs() / rep.scattering_energy);
        out.worst("projection", rep.projection_norm);
        out.worst("linearity", rep.linearity_defect.unwrap_or(f64::NAN));
        out.worst("x_constant", rep.x_constant);
        out.check("residual", rep.residual_ok);
        out.check("exterior_energy", rep.energy_ok);
        out.check("measured_energy", rep.measured_ok);
        out.check("projection", rep.projection_ok);
        out.check("linearity", rep.linearity_ok && rep.linearity_defect.is_some());
        out.check("x_bound", rep.x_constant.is_finite());
    }
    Ok(out)
}

/// Least-squares slope of ln y against ln x.
fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn phi_slice(_seed: u64) -> Result<CriterionResult, CliError> {
    let mut out = CriterionResult::new(9, "Phi slice");
    let g = Grid::new(2048, 64.0)?;
    let radius = 1.0;
    let m = ModeIndex::radial(dim(3));
    let spec = plr_basis(m.d, 0, radius)?;
    let f0 = CauchyData::single(spec.materialize_member(0, Slot::Field, m, g)?, RadialProfile::zeros(m, g))?;
    let unit = f0.scaled(1.0 / f0.norm_h());
    let nl = NonlinearityConfig::defocusing(m.d);
    let cfg = PicardConfig::default();
    let sizes = [0.025, 0.05, 0.1];
    let mut distances = Vec::new();
    for size in sizes {
        let res = phi_map(&unit.scaled(size), radius, &nl, &cfg)?;
        let geometric = res.report.ratios.iter().all(|q| *q < 1.0);
        let checks = phi_checks(&res, radius, nl.q, &[10.0, 20.0])?;
        let tag = format!("size_{size}");
        out.metric(&format!("{tag}_iterations"), res.report.iterations as f64);
        out.metric(&format!("{tag}_last_ratio"), res.report.last_ratio().unwrap_or(0.0));
        out.metric(&format!("{tag}_pi_r_residual"), checks.pi_r_residual);
        out.metric(&format!("{tag}_exterior_t20"), checks.exterior.measured_last().unwrap_or(f64::NAN));
        out.metric(&format!("{tag}_exterior_bound"), checks.exterior_bound);
        out.check("converged_geometric", res.report.converged && geometric);
        out.check("pi_r", checks.pi_r_ok);
        out.check("exterior_energy", checks.exterior_ok);
        distances.push(checks.distance);
    }
    let slope = log_slope(&sizes, &distances);
    out.metric("slope", slope);
    out.check("slope", (slope - 5.0).abs() <= 0.3);
    Ok(out)
}

fn wave_operator_slice(_seed: u64) -> Result<CriterionResult, CliError> {
    let mut out = CriterionResult::new(10, "wave operator slice");
    let g = Grid::new(2048, 64.0)?;
    let m = ModeIndex::radial(dim(3));
    let field = profile(m, g, |r| poly_bump(r, 2.0, 1.0))?;
    let velocity = profile(m, g, |r| poly_bump(r, 2.5, 1.0))?;
    let data = CauchyData::single(field, velocity)?;
    let f = radiation_field(&data)?;
    let f = f.combine(0.05 / f.norm_sq().sqrt(), &f, 0.0)?;
    let norm = f.norm_sq().sqrt();
    let nl = NonlinearityConfig::defocusing(m.d);
    let res = wave_operator(&f, 0.0, &nl, &PicardConfig::default())?;
    let checks = wave_operator_checks(&res, &f, &[5.0, 10.0, 20.0])?;
    let last = checks.distances.last().copied().unwrap_or(f64::NAN);
    out.metric("radiation_norm", norm);
    out.metric("iterations", res.report.iterations as f64);
    out.metric("distance_t20", last);
    out.metric("asymptotic_t20", checks.asymptotics.last().copied().unwrap_or(f64::NAN));
    out.check("converged", res.report.converged && res.start == 0.0);
    out.check("distance_decreasing", checks.distances_decreasing);
    out.check("distance_bound", last <= 1e-3 * norm);
    out.check("asymptotics_decreasing", checks.asymptotics_decreasing);
    Ok(out)
}
