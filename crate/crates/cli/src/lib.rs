//! Scenario runner for the `nonrad` binary: JSON configs, data builders,
//! reports with config hashes, and the verification suite.

pub mod config;
pub mod describe;
pub mod profiles;
pub mod report;
pub mod scenarios;
pub mod suite;

use thiserror::Error;

pub use config::{DataConfig, ScenarioConfig, ScenarioKind};
pub use report::Report;
pub use scenarios::{run, Outcome};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {message}", location(.path))]
    Config { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Field(#[from] field_core::FieldError),
    #[error(transparent)]
    Hankel(#[from] spectral_hankel::HankelError),
    #[error(transparent)]
    Lightcone(#[from] lightcone_transform::LightconeError),
    #[error(transparent)]
    Exterior(#[from] exterior_energy::ExteriorError),
    #[error(transparent)]
    Plr(#[from] plr_space::PlrError),
    #[error(transparent)]
    Duhamel(#[from] duhamel_engine::DuhamelError),
    #[error(transparent)]
    Nonlinear(#[from] nonlinear_flow::NonlinearError),
}

fn location(path: &str) -> String {
    if path.is_empty() {
        String::new()
    } else {
        format!(" at `{path}`")
    }
}

impl CliError {
    pub fn config(path: &str, message: impl Into<String>) -> Self {
        Self::Config { path: path.into(), message: message.into() }
    }

    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => 2,
            _ => 1,
        }
    }
}
