use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use duhamel_engine::{nonradiative_source_solve, SolveConfig};
use exterior_energy::{exterior_energy_formula, exterior_energy_measure, ExteriorEnergyReport};
use field_core::{CauchyData, Container, ModeIndex, Slot};
use lightcone_transform::{invert_radiation, radiation_field, RadiationProfile};
use nonlinear_flow::{
    phi_checks, phi_map, wave_operator, wave_operator_checks, NonlinearError, NonlinearityConfig, PhiChecks, PicardConfig,
    PicardReport, WaveOperatorChecks,
};
use plr_space::{is_nonradiative_linear, pi_r, project_pr, NonradiativeReport};
use spectral_hankel::hankel_inverse;

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::profiles::{build_data, build_source, read_radiation};
use crate::report::{num, Report, Table};
use crate::suite::{run_suite, SuiteReport};
use crate::CliError;

/// A finished scenario: the report plus plot tables and state files.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub tables: Vec<Table>,
    pub containers: Vec<(String, Container)>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed {
            0
        } else {
            1
        }
    }

    /// report.json, one CSV per table and one `.bin` per container.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.report.to_json()?)?;
        for t in &self.tables {
            t.write(dir)?;
        }
        for (name, c) in &self.containers {
            c.write_to(BufWriter::new(File::create(dir.join(format!("{name}.bin")))?))?;
        }
        Ok(())
    }
}

pub fn run(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    match cfg.scenario {
        ScenarioKind::Radiation => radiation(cfg),
        ScenarioKind::ExteriorEnergy => exterior(cfg),
        ScenarioKind::Invert => invert(cfg),
        ScenarioKind::PlrProject => plr_project(cfg),
        ScenarioKind::NonradiativeSource => nonradiative(cfg),
        ScenarioKind::NonlinearPhi => nonlinear_phi(cfg),
        ScenarioKind::WaveOperator => wave(cfg),
        ScenarioKind::VerifySuite => verify(cfg),
    }
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Comma-free column label of a mode.
fn label(m: &ModeIndex) -> String {
    format!("d{}_l{}_m{}", m.d.value(), m.l, m.m)
}

/// s followed by one column per mode.
fn radiation_table(name: &str, f: &RadiationProfile) -> Table {
    let modes: Vec<String> = f.modes.keys().map(|m| format!("G_{}", label(m))).collect();
    let mut header = vec!["s"];
    header.extend(modes.iter().map(String::as_str));
    let mut t = Table::new(name, &header);
    for (i, s) in f.grid.s_nodes().into_iter().enumerate() {
        t.push(std::iter::once(num(s)).chain(f.modes.values().map(|g| num(g[i]))));
    }
    t
}

/// r followed by the physical field and velocity coefficients of each mode.
fn state_table(name: &str, state: &CauchyData) -> Table {
    let mut header = vec!["r".to_string()];
    let mut cols = Vec::new();
    for (m, s) in &state.modes {
        header.push(format!("v0_{}", label(m)));
        header.push(format!("v1_{}", label(m)));
        cols.push(hankel_inverse(&s.field).physical.unwrap_or_default());
        cols.push(hankel_inverse(&s.velocity).physical.unwrap_or_default());
    }
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new(name, &refs);
    for (j, r) in state.grid.r_nodes().into_iter().enumerate() {
        t.push(std::iter::once(num(r)).chain(cols.iter().map(|c| num(c[j]))));
    }
    t
}

fn measured_table(e: &ExteriorEnergyReport) -> Table {
    let mut t = Table::new("exterior_energy", &["time", "forward", "backward", "value", "formula"]);
    let formula = e.formula.map(num).unwrap_or_default();
    for m in &e.measured {
        t.push([num(m.time), num(m.forward), num(m.backward), num(m.value), formula.clone()]);
    }
    t
}

#[derive(Serialize)]
struct RadiationResults {
    data_norm_sq: f64,
    radiation_norm_sq: f64,
    isometry_defect: f64,
    data_round_trip: f64,
    radiation_round_trip: f64,
}

fn round_trips(state: &CauchyData, f: &RadiationProfile) -> Result<RadiationResults, CliError> {
    let data_norm_sq = state.norm_h().powi(2);
    let radiation_norm_sq = f.norm_sq();
    let back = invert_radiation(f)?;
    let again = radiation_field(&back)?;
    Ok(RadiationResults {
        data_norm_sq,
        radiation_norm_sq,
        isometry_defect: relative((radiation_norm_sq - data_norm_sq).abs(), data_norm_sq),
        data_round_trip: relative(back.combine(1.0, state, -1.0)?.norm_h(), state.norm_h()),
        radiation_round_trip: relative(again.combine(1.0, f, -1.0)?.norm_sq().sqrt(), radiation_norm_sq.sqrt()),
    })
}

fn radiation(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let state = build_data(cfg)?;
    let f = radiation_field(&state)?;
    let res = round_trips(&state, &f)?;
    let tol = &cfg.tolerances;
    let checks = [
        ("isometry", res.isometry_defect <= tol.isometry_rel),
        ("round_trip", res.data_round_trip <= tol.round_trip && res.radiation_round_trip <= tol.round_trip),
    ];
    Ok(Outcome {
        report: Report::new(cfg, &res, &checks)?,
        tables: vec![radiation_table("radiation", &f)],
        containers: vec![("radiation".into(), f.to_container())],
    })
}

fn invert(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let f = match &cfg.input {
        Some(path) => read_radiation(path)?,
        None => radiation_field(&build_data(cfg)?)?,
    };
    let state = invert_radiation(&f)?;
    let res = round_trips(&state, &f)?;
    let tol = &cfg.tolerances;
    let checks = [
        ("isometry", res.isometry_defect <= tol.isometry_rel),
        ("round_trip", res.radiation_round_trip <= tol.round_trip),
    ];
    Ok(Outcome {
        report: Report::new(cfg, &res, &checks)?,
        tables: vec![state_table("state", &state)],
        containers: vec![("state".into(), state.to_container())],
    })
}

fn exterior(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let state = build_data(cfg)?;
    let mut e = exterior_energy_formula(&state, cfg.radius)?;
    let m = exterior_energy_measure(&state, cfg.radius, &cfg.measure_times)?;
    e.measured = m.measured;
    e.extrapolated = m.extrapolated;
    let formula = e.formula.unwrap_or(0.0);
    let measured_ok = e
        .measured_last()
        .is_none_or(|v| (v - formula).abs() <= (cfg.tolerances.measured_rel * formula).max(exterior_energy::ENERGY_TOL));
    let table = measured_table(&e);
    Ok(Outcome { report: Report::new(cfg, &e, &[("measured_matches_formula", measured_ok)])?, tables: vec![table], containers: vec![] })
}

#[derive(Serialize)]
struct ProjectionResults {
    coefficients: Vec<(ModeIndex, Vec<(usize, f64)>, Vec<(usize, f64)>)>,
    data_norm: f64,
    projection_norm: f64,
    compact_norm: f64,
    idempotence: f64,
    projection: NonradiativeReport,
}

fn plr_project(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let state = build_data(cfg)?;
    let e = project_pr(&state, cfg.radius)?;
    let p = pi_r(&state, cfg.radius)?;
    let pp = pi_r(&p, cfg.radius)?;
    let data_norm = state.norm_h();
    let idempotence = relative(pp.combine(1.0, &p, -1.0)?.norm_h(), data_norm);
    let projection = is_nonradiative_linear(&p, cfg.radius)?;
    let mut table = Table::new("plr_coefficients", &["mode", "slot", "k", "coefficient"]);
    for (m, c) in &e.coefficients {
        for slot in [Slot::Field, Slot::Velocity] {
            for (k, v) in c.slot(slot) {
                table.push([label(m), format!("{slot:?}").to_lowercase(), k.to_string(), num(*v)]);
            }
        }
    }
    let res = ProjectionResults {
        coefficients: e.coefficients.iter().map(|(m, c)| (*m, c.field.clone(), c.velocity.clone())).collect(),
        data_norm,
        projection_norm: p.norm_h(),
        compact_norm: e.compact.norm_h(),
        idempotence,
        projection,
    };
    let checks = [
        ("idempotent", res.idempotence <= 1e-10),
        ("non_expansive", res.projection_norm <= (1.0 + 1e-8) * data_norm),
        ("image_non_radiative", res.projection.member),
    ];
    Ok(Outcome {
        report: Report::new(cfg, &res, &checks)?,
        tables: vec![table, state_table("projection", &p)],
        containers: vec![("projection".into(), p.to_container())],
    })
}

fn nonradiative(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let h = build_source(cfg)?;
    let solve = SolveConfig {
        measure_times: cfg.measure_times.clone(),
        x_window: cfg.time.window,
        x_step: cfg.time.dt,
        check_linearity: true,
    };
    let sol = nonradiative_source_solve(&h, cfg.radius, &solve)?;
    let rep = sol.report.as_ref().expect("solve attaches a report");
    let mut norms = Table::new("solution_norm", &["time", "norm_h"]);
    let tr = sol.trajectory(-cfg.time.window, cfg.time.window, cfg.time.dt)?;
    for (t, s) in tr.times.iter().zip(&tr.states) {
        norms.push([num(*t), num(s.norm_h())]);
    }
    let checks = [
        ("residual", rep.residual_ok),
        ("exterior_energy", rep.energy_ok),
        ("measured_energy", rep.measured_ok),
        ("projection", rep.projection_ok),
        ("linearity", rep.linearity_ok),
        ("x_norm_finite", rep.x_norm.is_finite()),
    ];
    Ok(Outcome {
        report: Report::new(cfg, rep, &checks)?,
        tables: vec![measured_table(&rep.measured), norms],
        containers: vec![("initial_data".into(), sol.initial_data()?.to_container())],
    })
}

fn picard_config(cfg: &ScenarioConfig) -> PicardConfig {
    PicardConfig { window: cfg.time.window, dt: cfg.time.dt, tol: cfg.tolerances.picard, ..PicardConfig::default() }
}

fn picard_table(rep: &PicardReport) -> Table {
    let mut t = Table::new("picard", &["iteration", "x_difference", "ratio"]);
    for (i, d) in rep.differences.iter().enumerate() {
        let ratio = if i == 0 { String::new() } else { num(rep.ratios[i - 1]) };
        t.push([(i + 1).to_string(), num(*d), ratio]);
    }
    t
}

#[derive(Serialize)]
struct Divergence<'a> {
    diverged: bool,
    picard: &'a PicardReport,
}

fn diverged(cfg: &ScenarioConfig, rep: &PicardReport) -> Result<Outcome, CliError> {
    let res = Divergence { diverged: true, picard: rep };
    Ok(Outcome { report: Report::new(cfg, &res, &[("picard_converged", false)])?, tables: vec![picard_table(rep)], containers: vec![] })
}

#[derive(Serialize)]
struct PhiResults<'a> {
    picard: &'a PicardReport,
    checks: PhiChecks,
}

fn nonlinear_phi(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let data = build_data(cfg)?;
    let nl = NonlinearityConfig::new(cfg.dim(), cfg.sigma);
    let res = match phi_map(&data, cfg.radius, &nl, &picard_config(cfg)) {
        Ok(res) => res,
        Err(NonlinearError::Divergence(rep)) => return diverged(cfg, &rep),
        Err(e) => return Err(e.into()),
    };
    let checks = phi_checks(&res, cfg.radius, nl.q, &cfg.measure_times)?;
    let ok = [
        ("picard_converged", res.report.converged),
        ("pi_r_preserved", checks.pi_r_ok),
        ("exterior_energy", checks.exterior_ok),
    ];
    let tables = vec![picard_table(&res.report), measured_table(&checks.exterior)];
    let out = PhiResults { picard: &res.report, checks };
    Ok(Outcome { report: Report::new(cfg, &out, &ok)?, tables, containers: vec![("phi".into(), res.phi.to_container())] })
}

#[derive(Serialize)]
struct WaveResults<'a> {
    radiation_norm: f64,
    start: f64,
    picard: &'a PicardReport,
    checks: WaveOperatorChecks,
    distance_bound: f64,
}

fn wave(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let f = radiation_field(&build_data(cfg)?)?;
    let nl = NonlinearityConfig::new(cfg.dim(), cfg.sigma);
    let res = match wave_operator(&f, 0.0, &nl, &picard_config(cfg)) {
        Ok(res) => res,
        Err(NonlinearError::Divergence(rep)) => return diverged(cfg, &rep),
        Err(e) => return Err(e.into()),
    };
    let checks = wave_operator_checks(&res, &f, &cfg.measure_times)?;
    let radiation_norm = f.norm_sq().sqrt();
    let distance_bound = 1e-3 * radiation_norm;
    let mut table = Table::new("wave_operator", &["time", "distance", "asymptotic_discrepancy"]);
    for ((t, d), a) in checks.times.iter().zip(&checks.distances).zip(&checks.asymptotics) {
        table.push([num(*t), num(*d), num(*a)]);
    }
    let ok = [
        ("picard_converged", res.report.converged),
        ("distance_decreasing", checks.distances_decreasing),
        ("distance_bound", checks.distances.last().is_some_and(|d| *d <= distance_bound)),
        ("asymptotics_decreasing", checks.asymptotics_decreasing),
    ];
    let out = WaveResults { radiation_norm, start: res.start, picard: &res.report, checks, distance_bound };
    Ok(Outcome {
        report: Report::new(cfg, &out, &ok)?,
        tables: vec![table, picard_table(&res.report)],
        containers: vec![("scattering_data".into(), res.scattering_data.to_container())],
    })
}

#[derive(Serialize)]
struct VerifyResults {
    suite: SuiteReport,
    repeats: usize,
    byte_identical: bool,
}

fn verify(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let first = run_suite(cfg.seed)?;
    let bytes = serde_json::to_vec(&first)?;
    let mut identical = true;
    for _ in 1..cfg.repeat {
        identical &= serde_json::to_vec(&run_suite(cfg.seed)?)? == bytes;
    }
    let mut table = Table::new("criteria", &["id", "name", "passed"]);
    for c in &first.criteria {
        table.push([c.id.to_string(), c.name.to_string(), c.passed.to_string()]);
    }
    let mut checks: Vec<(String, bool)> = first.criteria.iter().map(|c| (format!("criterion_{}", c.id), c.passed)).collect();
    checks.push(("determinism".into(), identical));
    let refs: Vec<(&str, bool)> = checks.iter().map(|(n, ok)| (n.as_str(), *ok)).collect();
    let res = VerifyResults { suite: first, repeats: cfg.repeat, byte_identical: identical };
    Ok(Outcome { report: Report::new(cfg, &res, &refs)?, tables: vec![table], containers: vec![] })
}
