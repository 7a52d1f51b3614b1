use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::ScenarioConfig;
use crate::CliError;

/// Bumped whenever a tolerance in the table below changes.
pub const TOLERANCE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuleTolerances {
    pub version: u32,
    pub values: BTreeMap<&'static str, f64>,
}

/// The module tolerances every report is checked against.
pub fn tolerance_versions() -> BTreeMap<&'static str, ModuleTolerances> {
    let table: [(&str, Vec<(&str, f64)>); 5] = [
        ("spectral-hankel", vec![("tail_error", spectral_hankel::TAIL_ERROR), ("tail_warn", spectral_hankel::TAIL_WARN)]),
        ("exterior-energy", vec![("energy_floor", exterior_energy::ENERGY_TOL)]),
        ("plr-space", vec![("nonradiative", plr_space::NONRADIATIVE_TOL), ("max_condition", plr_space::MAX_CONDITION)]),
        (
            "duhamel-engine",
            vec![
                ("residual", duhamel_engine::RESIDUAL_TOL),
                ("energy", duhamel_engine::ENERGY_TOL),
                ("measure", duhamel_engine::MEASURE_TOL),
                ("projection", duhamel_engine::PROJECTION_TOL),
                ("linearity", duhamel_engine::LINEARITY_TOL),
            ],
        ),
        ("nonlinear-flow", vec![("exterior", nonlinear_flow::EXTERIOR_TOL), ("pi_r", nonlinear_flow::PI_R_TOL)]),
    ];
    table
        .into_iter()
        .map(|(k, v)| (k, ModuleTolerances { version: TOLERANCE_VERSION, values: v.into_iter().collect() }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenario: &'static str,
    pub config_hash: String,
    pub tolerance_versions: BTreeMap<&'static str, ModuleTolerances>,
    pub config: ScenarioConfig,
    pub passed: bool,
    /// Failed postconditions, by name.
    pub failures: Vec<String>,
    pub results: Value,
}

impl Report {
    pub fn new(cfg: &ScenarioConfig, results: impl Serialize, checks: &[(&str, bool)]) -> Result<Self, CliError> {
        let failures: Vec<String> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.to_string()).collect();
        Ok(Self {
            scenario: cfg.scenario.name(),
            config_hash: cfg.hash(),
            tolerance_versions: tolerance_versions(),
            config: cfg.clone(),
            passed: failures.is_empty(),
            failures,
            results: serde_json::to_value(results)?,
        })
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// A CSV table held in memory until written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: impl IntoIterator<Item = String>) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::write(dir.join(format!("{}.csv", self.name)), self.to_csv()?)?;
        Ok(())
    }
}

/// Number formatting shared by every table.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}
