use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cli::describe::describe;
use cli::{run, CliError, ScenarioConfig, ScenarioKind};

#[derive(Parser)]
#[command(name = "nonrad", about = "Radiation fields, exterior energies and non-radiative solutions of the wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON scenario config; scenario defaults fill missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for report.json, CSV tables and state containers.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Scenario kind, used by `run` and `describe`.
    #[arg(long)]
    scenario: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario named in the config or by --scenario.
    Run(Common),
    /// Print the plan without computing.
    Describe(Common),
    /// Radiation field of the data, with isometry and round-trip checks.
    Radiation(Common),
    /// Exterior energy by formula and by direct measurement.
    ExteriorEnergy(Common),
    /// Data from a radiation field container.
    Invert(Common),
    /// Projection onto P_L(R) and the truncation pi_R.
    PlrProject(Common),
    /// Non-radiative solution driven by a compact source.
    NonradiativeSource(Common),
    /// The nonlinear map Phi on radial data.
    NonlinearPhi(Common),
    /// Nonlinear solution scattering to a given radiation field.
    WaveOperator(Common),
    /// The full property suite, repeated to check reproducibility.
    VerifySuite(Common),
}

fn load(c: &Common, fixed: Option<ScenarioKind>) -> Result<ScenarioConfig, CliError> {
    let flag = match &c.scenario {
        Some(s) => Some(ScenarioKind::parse(s).ok_or_else(|| CliError::config("scenario", format!("unknown scenario {s:?}")))?),
        None => None,
    };
    let kind = fixed.or(flag);
    let mut cfg = match &c.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::config("", format!("{}: {e}", path.display())))?;
            ScenarioConfig::from_json(&text, kind)?
        }
        None => ScenarioConfig::default_for(kind.ok_or_else(|| CliError::config("scenario", "pass --config or --scenario"))?),
    };
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &c.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn execute(command: Command) -> Result<i32, CliError> {
    let (common, fixed) = match command {
        Command::Describe(c) => {
            print!("{}", describe(&load(&c, None)?)?);
            return Ok(0);
        }
        Command::Run(c) => (c, None),
        Command::Radiation(c) => (c, Some(ScenarioKind::Radiation)),
        Command::ExteriorEnergy(c) => (c, Some(ScenarioKind::ExteriorEnergy)),
        Command::Invert(c) => (c, Some(ScenarioKind::Invert)),
        Command::PlrProject(c) => (c, Some(ScenarioKind::PlrProject)),
        Command::NonradiativeSource(c) => (c, Some(ScenarioKind::NonradiativeSource)),
        Command::NonlinearPhi(c) => (c, Some(ScenarioKind::NonlinearPhi)),
        Command::WaveOperator(c) => (c, Some(ScenarioKind::WaveOperator)),
        Command::VerifySuite(c) => (c, Some(ScenarioKind::VerifySuite)),
    };
    let cfg = load(&common, fixed)?;
    let outcome = run(&cfg)?;
    match &cfg.output {
        Some(dir) => {
            outcome.write(dir)?;
            eprintln!("wrote {}", dir.join("report.json").display());
        }
        None => print!("{}", outcome.report.to_json()?),
    }
    if !outcome.report.passed {
        eprintln!("postconditions failed: {}", outcome.report.failures.join(", "));
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
