use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use field_core::{Dimension, Grid, ModeIndex};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Radiation,
    ExteriorEnergy,
    Invert,
    PlrProject,
    NonradiativeSource,
    NonlinearPhi,
    WaveOperator,
    VerifySuite,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        Self::Radiation,
        Self::ExteriorEnergy,
        Self::Invert,
        Self::PlrProject,
        Self::NonradiativeSource,
        Self::NonlinearPhi,
        Self::WaveOperator,
        Self::VerifySuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Radiation => "radiation",
            Self::ExteriorEnergy => "exterior-energy",
            Self::Invert => "invert",
            Self::PlrProject => "plr-project",
            Self::NonradiativeSource => "nonradiative-source",
            Self::NonlinearPhi => "nonlinear-phi",
            Self::WaveOperator => "wave-operator",
            Self::VerifySuite => "verify-suite",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// M radial cells; the light-cone line carries 2M points.
    pub cells: usize,
    /// r_max = s_max.
    pub extent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub window: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlotName {
    Field,
    Velocity,
}

/// Initial data, or the state whose radiation field is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataConfig {
    /// (0, 1_{[inner, outer]}) as a function on R^d.
    ShellVelocity { inner: f64, outer: f64 },
    /// Polynomial bumps (1 - ((r-c)/w)²)^8 in each slot; a zero width leaves the slot empty.
    Bump { field_center: f64, field_width: f64, velocity_center: f64, velocity_width: f64 },
    /// A power-law tail f_k or g_k of P_L(R).
    PlrMember { k: usize, slot: SlotName },
    /// A state stored in the container format.
    Container { path: PathBuf },
}

/// φ(t) ψ(r) with a time profile e^{-t²/τ²} cut at |t| = support and a radial Gaussian e^{-r²/σ²}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub time_width: f64,
    pub radial_width: f64,
    pub support: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative agreement of the last measured cone energy with the formula.
    pub measured_rel: f64,
    /// Relative isometry defect of the radiation map.
    pub isometry_rel: f64,
    /// Relative round-trip error of the radiation map.
    pub round_trip: f64,
    /// Picard stopping tolerance, relative to ‖r‖_X.
    pub picard: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { measured_rel: 1e-2, isometry_rel: 1e-5, round_trip: 1e-4, picard: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub dimension: u32,
    pub degrees: Vec<u32>,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub radius: f64,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub data: DataConfig,
    /// Rescales the data (or the radiation field) to this norm.
    pub data_norm: Option<f64>,
    pub source: SourceConfig,
    /// +1 focusing, -1 defocusing.
    pub sigma: f64,
    pub measure_times: Vec<f64>,
    /// Number of suite repetitions compared byte for byte.
    pub repeat: usize,
    /// Radiation container read by `invert`.
    pub input: Option<PathBuf>,
    /// Report directory; `--out` takes precedence. Not part of the hash.
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
}

/// Top-level config keys; `$schema` is accepted and ignored.
pub const KEYS: [&str; 17] = [
    "scenario",
    "dimension",
    "degrees",
    "grid",
    "time",
    "radius",
    "tolerances",
    "seed",
    "data",
    "data_norm",
    "source",
    "sigma",
    "measure_times",
    "repeat",
    "input",
    "output",
    "$schema",
];

impl ScenarioConfig {
    pub fn default_for(kind: ScenarioKind) -> Self {
        let mut cfg = Self {
            scenario: kind,
            dimension: 3,
            degrees: vec![0],
            grid: GridConfig { cells: 2048, extent: 32.0 },
            time: TimeConfig { window: 40.0, dt: 0.05 },
            radius: 1.0,
            tolerances: Tolerances::default(),
            seed: 20240611,
            data: DataConfig::Bump { field_center: 2.0, field_width: 1.0, velocity_center: 2.5, velocity_width: 1.0 },
            data_norm: None,
            source: SourceConfig { time_width: 1.0, radial_width: 1.0, support: 4.0 },
            sigma: -1.0,
            measure_times: vec![10.0, 20.0],
            repeat: 2,
            input: None,
            output: None,
        };
        match kind {
            ScenarioKind::ExteriorEnergy => {
                cfg.grid = GridConfig { cells: 8192, extent: 32.0 };
                cfg.data = DataConfig::ShellVelocity { inner: 1.0, outer: 2.0 };
                cfg.measure_times = vec![5.0, 10.0, 20.0];
            }
            ScenarioKind::NonradiativeSource => {
                cfg.grid = GridConfig { cells: 768, extent: 48.0 };
                cfg.time = TimeConfig { window: 20.0, dt: 0.05 };
            }
            ScenarioKind::NonlinearPhi => {
                cfg.grid = GridConfig { cells: 2048, extent: 64.0 };
                cfg.data = DataConfig::PlrMember { k: 0, slot: SlotName::Field };
                cfg.data_norm = Some(0.05);
            }
            ScenarioKind::WaveOperator => {
                cfg.grid = GridConfig { cells: 2048, extent: 64.0 };
                cfg.data_norm = Some(0.05);
                cfg.measure_times = vec![5.0, 10.0, 20.0];
            }
            _ => {}
        }
        cfg
    }

    /// Parses a JSON config over the scenario defaults. `override_kind` wins over the file's `scenario`.
    pub fn from_json(text: &str, override_kind: Option<ScenarioKind>) -> Result<Self, CliError> {
        let user: Value = serde_json::from_str(text).map_err(|e| CliError::config("", format!("invalid JSON: {e}")))?;
        Self::from_value(user, override_kind)
    }

    pub fn from_value(user: Value, override_kind: Option<ScenarioKind>) -> Result<Self, CliError> {
        let Value::Object(user) = user else {
            return Err(CliError::config("", "config must be a JSON object"));
        };
        for key in user.keys() {
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::config(key, format!("unknown field; expected one of {}", KEYS[..16].join(", "))));
            }
        }
        let kind = match (override_kind, user.get("scenario")) {
            (Some(k), _) => k,
            (None, Some(v)) => field::<ScenarioKind>(v, "scenario")?,
            (None, None) => return Err(CliError::config("scenario", "missing; pass it in the file or with --scenario")),
        };
        let mut merged = match serde_json::to_value(Self::default_for(kind)).expect("config serializes") {
            Value::Object(m) => m,
            _ => unreachable!("config serializes to an object"),
        };
        for (key, value) in user {
            if key == "$schema" {
                continue;
            }
            let slot = merged.entry(key.clone()).or_insert(Value::Null);
            merge(slot, value);
        }
        merged.insert("scenario".into(), serde_json::to_value(kind).expect("kind serializes"));
        let cfg = Self::from_merged(&merged)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_merged(m: &Map<String, Value>) -> Result<Self, CliError> {
        let get = |k: &str| m.get(k).unwrap_or(&Value::Null);
        check_keys(get("grid"), "grid", &["cells", "extent"])?;
        check_keys(get("time"), "time", &["window", "dt"])?;
        Ok(Self {
            scenario: field(get("scenario"), "scenario")?,
            dimension: field(get("dimension"), "dimension")?,
            degrees: field(get("degrees"), "degrees")?,
            grid: GridConfig {
                cells: field(nested(get("grid"), "cells"), "grid.cells")?,
                extent: field(nested(get("grid"), "extent"), "grid.extent")?,
            },
            time: TimeConfig {
                window: field(nested(get("time"), "window"), "time.window")?,
                dt: field(nested(get("time"), "dt"), "time.dt")?,
            },
            radius: field(get("radius"), "radius")?,
            tolerances: field(get("tolerances"), "tolerances")?,
            seed: field(get("seed"), "seed")?,
            data: field(get("data"), "data")?,
            data_norm: field(get("data_norm"), "data_norm")?,
            source: field(get("source"), "source")?,
            sigma: field(get("sigma"), "sigma")?,
            measure_times: field(get("measure_times"), "measure_times")?,
            repeat: field(get("repeat"), "repeat")?,
            input: field(get("input"), "input")?,
            output: field(get("output"), "output")?,
        })
    }

    /// Semantic checks beyond the JSON shape.
    pub fn validate(&self) -> Result<(), CliError> {
        Dimension::new(self.dimension).map_err(|e| CliError::config("dimension", e.to_string()))?;
        if self.degrees.is_empty() {
            return Err(CliError::config("degrees", "at least one degree is required"));
        }
        positive("grid.extent", self.grid.extent)?;
        if self.grid.cells == 0 {
            return Err(CliError::config("grid.cells", "must be positive"));
        }
        positive("time.window", self.time.window)?;
        positive("time.dt", self.time.dt)?;
        let steps = self.time.window / self.time.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(CliError::config("time.dt", "must divide time.window"));
        }
        positive("radius", self.radius)?;
        positive("tolerances.measured_rel", self.tolerances.measured_rel)?;
        positive("tolerances.isometry_rel", self.tolerances.isometry_rel)?;
        positive("tolerances.round_trip", self.tolerances.round_trip)?;
        positive("tolerances.picard", self.tolerances.picard)?;
        if let Some(n) = self.data_norm {
            positive("data_norm", n)?;
        }
        positive("source.time_width", self.source.time_width)?;
        positive("source.radial_width", self.source.radial_width)?;
        positive("source.support", self.source.support)?;
        if self.sigma != 1.0 && self.sigma != -1.0 {
            return Err(CliError::config("sigma", "must be +1 (focusing) or -1 (defocusing)"));
        }
        for (i, t) in self.measure_times.iter().enumerate() {
            positive(&format!("measure_times[{i}]"), *t)?;
        }
        if self.repeat == 0 {
            return Err(CliError::config("repeat", "must be at least 1"));
        }
        match &self.data {
            DataConfig::ShellVelocity { inner, outer } => {
                if !(*inner >= 0.0 && outer > inner) {
                    return Err(CliError::config("data.outer", "shell needs 0 <= inner < outer"));
                }
            }
            DataConfig::Bump { field_width, velocity_width, .. } => {
                if *field_width < 0.0 || *velocity_width < 0.0 {
                    return Err(CliError::config("data.field_width", "widths must be non-negative"));
                }
            }
            DataConfig::PlrMember { .. } | DataConfig::Container { .. } => {}
        }
        Ok(())
    }

    pub fn dim(&self) -> Dimension {
        Dimension::new(self.dimension).expect("validated")
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.grid.cells, self.grid.extent).map_err(|e| CliError::config("grid", e.to_string()))
    }

    /// One mode per degree, the first multiplicity slot of each.
    pub fn modes(&self) -> Result<Vec<ModeIndex>, CliError> {
        self.degrees
            .iter()
            .enumerate()
            .map(|(i, &l)| ModeIndex::new(self.dimension, l, 0).map_err(|e| CliError::config(&format!("degrees[{i}]"), e.to_string())))
            .collect()
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn positive(path: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(path, format!("must be positive and finite, got {x}")))
    }
}

fn nested<'a>(v: &'a Value, key: &str) -> &'a Value {
    v.get(key).unwrap_or(&Value::Null)
}

fn field<T: DeserializeOwned>(v: &Value, path: &str) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::config(path, e.to_string()))
}

fn check_keys(v: &Value, parent: &str, allowed: &[&str]) -> Result<(), CliError> {
    match v {
        Value::Object(m) => match m.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::config(&format!("{parent}.{k}"), format!("unknown field; expected one of {}", allowed.join(", ")))),
            None => Ok(()),
        },
        _ => Err(CliError::config(parent, "expected an object")),
    }
}

/// Recursive object merge; non-objects replace.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            // Tagged data variants are replaced whole when the kind changes.
            if o.get("kind").is_some() && o.get("kind") != b.get("kind") {
                *b = o;
                return;
            }
            for (k, v) in o {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, o) => *b = o,
    }
}
