use std::fmt::Write;

use crate::config::{DataConfig, ScenarioConfig, ScenarioKind};
use crate::report::tolerance_versions;
use crate::CliError;

fn steps(kind: ScenarioKind) -> &'static [&'static str] {
    match kind {
        ScenarioKind::Radiation => &[
            "build data -> hankel_forward per slot",
            "radiation_field: dsT(v0) - T(v1) per mode",
            "invert_radiation -> data round trip",
            "radiation_field(inverse) -> radiation round trip",
        ],
        ScenarioKind::ExteriorEnergy => &[
            "build data -> hankel_forward per slot",
            "exterior_energy_formula: dsT/T restricted to s > R",
            "free_propagate to +-t for each measure time",
            "energy beyond |x| = R + |t|, both directions",
        ],
        ScenarioKind::Invert => &["read radiation container (or build data -> radiation_field)", "invert_radiation", "radiation_field(inverse) -> round trip"],
        ScenarioKind::PlrProject => &[
            "build data -> hankel_forward per slot",
            "plr_basis per mode -> Gram solve (project_pr)",
            "materialize -> pi_R(data)",
            "pi_R(pi_R(data)) -> idempotence",
            "is_nonradiative_linear(pi_R(data))",
        ],
        ScenarioKind::NonradiativeSource => &[
            "sample source on [-support, support]",
            "Duhamel from -infinity (per-interval closed form)",
            "scattering state v+ -> correction w in P_L(R) complement",
            "reproject: u = v + S(t)w - S(t)pi_R(u(0))",
            "postconditions: residual, directional energies, measured energies, pi_R(u(0)), linearity, X-norm",
        ],
        ScenarioKind::NonlinearPhi => &[
            "build data -> free evolution on [-T_w, T_w]",
            "Picard: f(u) -> non-radiative solve -> X-difference",
            "Phi(data) = data + r(0)",
            "checks: pi_R(Phi) = pi_R(data), measured exterior energy, distance",
        ],
        ScenarioKind::WaveOperator => &[
            "build data -> radiation_field F, rescaled",
            "invert_radiation -> free evolution v_L on [0, T_w]",
            "Picard: f(u) -> backward Duhamel from +infinity",
            "checks: |u - v_L|_H decreasing, radiation asymptotics",
        ],
        ScenarioKind::VerifySuite => &[
            "criteria 1-3: transform suite on (3,0) (3,1) (3,2) (5,0) (5,1)",
            "criteria 4-5: exterior energies",
            "criteria 6-7: P_L(R) bases and pi_R on randomized states",
            "criterion 8: five randomized non-radiative source solves",
            "criteria 9-10: Phi and wave operator slices",
            "repeat and compare serialized reports",
        ],
    }
}

fn data_line(d: &DataConfig) -> String {
    match d {
        DataConfig::ShellVelocity { inner, outer } => format!("shell velocity on [{inner}, {outer}]"),
        DataConfig::Bump { field_center, field_width, velocity_center, velocity_width } => {
            format!("bumps: field c={field_center} w={field_width}, velocity c={velocity_center} w={velocity_width}")
        }
        DataConfig::PlrMember { k, slot } => format!("P_L(R) member k={k} in the {slot:?} slot").to_lowercase(),
        DataConfig::Container { path } => format!("container {}", path.display()),
    }
}

/// The operation plan, grids and tolerance budget. Depends on neither the seed nor the clock.
pub fn describe(cfg: &ScenarioConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let modes = cfg.modes()?;
    let mut s = String::new();
    let w = &mut s;
    writeln!(w, "scenario: {}", cfg.scenario.name()).ok();
    writeln!(w, "dimension: {} (critical exponent {})", cfg.dimension, cfg.dim().critical_exponent()).ok();
    let names: Vec<String> = modes.iter().map(ToString::to_string).collect();
    writeln!(w, "modes: {}", names.join(" ")).ok();
    writeln!(w, "radial grid: M={} r_max={} h={}", grid.cells(), grid.extent(), grid.step()).ok();
    writeln!(w, "frequency grid: N={} rho_max={:.6}", grid.cells(), grid.rho_max()).ok();
    writeln!(w, "light-cone grid: {} points on [-{}, {}]", 2 * grid.cells(), grid.extent(), grid.extent()).ok();
    writeln!(w, "time: T_w={} dt={}", cfg.time.window, cfg.time.dt).ok();
    writeln!(w, "radius: {}", cfg.radius).ok();
    match cfg.scenario {
        ScenarioKind::NonradiativeSource => {
            let sc = &cfg.source;
            writeln!(w, "source: gaussian tau={} sigma={} on [-{}, {}]", sc.time_width, sc.radial_width, sc.support, sc.support).ok();
        }
        ScenarioKind::VerifySuite => {
            writeln!(w, "repeats: {}", cfg.repeat).ok();
        }
        _ => {
            writeln!(w, "data: {}", data_line(&cfg.data)).ok();
            if let Some(n) = cfg.data_norm {
                writeln!(w, "data norm: {n}").ok();
            }
        }
    }
    if matches!(cfg.scenario, ScenarioKind::NonlinearPhi | ScenarioKind::WaveOperator) {
        let sign = if cfg.sigma > 0.0 { "focusing" } else { "defocusing" };
        writeln!(w, "nonlinearity: {sign}").ok();
    }
    let times: Vec<String> = cfg.measure_times.iter().map(ToString::to_string).collect();
    writeln!(w, "measure times: {}", times.join(" ")).ok();
    writeln!(w, "operations:").ok();
    for (i, step) in steps(cfg.scenario).iter().enumerate() {
        writeln!(w, "  {}. {step}", i + 1).ok();
    }
    writeln!(w, "tolerances:").ok();
    let t = &cfg.tolerances;
    writeln!(w, "  measured_rel={} isometry_rel={} round_trip={} picard={}", t.measured_rel, t.isometry_rel, t.round_trip, t.picard).ok();
    for (module, tol) in tolerance_versions() {
        let vals: Vec<String> = tol.values.iter().map(|(k, v)| format!("{k}={v:e}")).collect();
        writeln!(w, "  {module} v{}: {}", tol.version, vals.join(" ")).ok();
    }
    Ok(s)
}
