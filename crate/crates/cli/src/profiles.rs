use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use rand::Rng;

use field_core::{CauchyData, Container, Dimension, Grid, ModeIndex, ModeState, RadialProfile, Slot, SourceTerm};
use lightcone_transform::RadiationProfile;
use plr_space::plr_basis;
use spectral_hankel::hankel_forward;

use crate::config::{DataConfig, ScenarioConfig, SlotName};
use crate::CliError;

/// (1 - ((r - c)/w)²)^8 on |r - c| < w.
pub fn poly_bump(r: f64, c: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let y = (r - c) / w;
    if y.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - y * y).powi(8)
    }
}

/// Spectral profile of a physical radial coefficient sampled on the cell centres.
pub fn profile(mode: ModeIndex, grid: Grid, f: impl Fn(f64) -> f64) -> Result<RadialProfile, CliError> {
    let v: Vec<f64> = grid.r_nodes().into_iter().map(f).collect();
    Ok(hankel_forward(&RadialProfile::zeros(mode, grid).with_physical(v)?)?)
}

pub fn nodes(a: f64, b: f64, dt: f64) -> Vec<f64> {
    let n = ((b - a) / dt).round() as usize;
    (0..=n).map(|i| a + i as f64 * dt).collect()
}

fn slot(name: SlotName) -> Slot {
    match name {
        SlotName::Field => Slot::Field,
        SlotName::Velocity => Slot::Velocity,
    }
}

pub fn read_container(path: &Path) -> Result<Container, CliError> {
    let file = File::open(path).map_err(|e| CliError::config("data.path", format!("{}: {e}", path.display())))?;
    Ok(Container::read_from(BufReader::new(file))?)
}

/// The configured initial data on every configured mode, rescaled to `data_norm` if set.
pub fn build_data(cfg: &ScenarioConfig) -> Result<CauchyData, CliError> {
    let grid = cfg.grid()?;
    let dim = cfg.dim();
    let mut state = match &cfg.data {
        DataConfig::Container { path } => {
            let state = CauchyData::from_container(&read_container(path)?)?;
            if state.dim != dim {
                return Err(CliError::config("data.path", format!("container holds d={}, config asks d={}", state.dim.value(), dim.value())));
            }
            state
        }
        data => {
            let mut state = CauchyData::empty(dim, grid);
            for mode in cfg.modes()? {
                state.insert(mode_state(data, mode, grid, cfg.radius)?)?;
            }
            state
        }
    };
    if let Some(n) = cfg.data_norm {
        let norm = state.norm_h();
        if norm == 0.0 {
            return Err(CliError::config("data_norm", "data is zero and cannot be rescaled"));
        }
        state = state.scaled(n / norm);
    }
    Ok(state)
}

fn mode_state(data: &DataConfig, mode: ModeIndex, grid: Grid, radius: f64) -> Result<ModeState, CliError> {
    let zero = RadialProfile::zeros(mode, grid);
    Ok(match *data {
        DataConfig::ShellVelocity { inner, outer } => {
            let c = mode.d.sphere_area().sqrt();
            let v = profile(mode, grid, |r| if (inner..outer).contains(&r) { c } else { 0.0 })?;
            ModeState { field: zero, velocity: v }
        }
        DataConfig::Bump { field_center, field_width, velocity_center, velocity_width } => ModeState {
            field: profile(mode, grid, |r| poly_bump(r, field_center, field_width))?,
            velocity: profile(mode, grid, |r| poly_bump(r, velocity_center, velocity_width))?,
        },
        DataConfig::PlrMember { k, slot: name } => {
            let spec = plr_basis(mode.d, mode.l, radius)?;
            let s = slot(name);
            if !spec.indices(s).contains(&k) {
                return Err(CliError::config(
                    "data.k",
                    format!("k={k} is not admissible for d={} l={} ({:?} slot allows {:?})", mode.d.value(), mode.l, s, spec.indices(s)),
                ));
            }
            let p = spec.materialize_member(k, s, mode, grid)?;
            match s {
                Slot::Field => ModeState { field: p, velocity: zero },
                Slot::Velocity => ModeState { field: zero, velocity: p },
            }
        }
        DataConfig::Container { .. } => unreachable!("containers are read whole"),
    })
}

/// Radiation field read from `input`.
pub fn read_radiation(path: &Path) -> Result<RadiationProfile, CliError> {
    let file = File::open(path).map_err(|e| CliError::config("input", format!("{}: {e}", path.display())))?;
    Ok(RadiationProfile::from_container(&Container::read_from(BufReader::new(file))?)?)
}

/// φ(t)ψ(r) on every configured mode, sampled on the nodes of [-support, support].
pub fn build_source(cfg: &ScenarioConfig) -> Result<SourceTerm, CliError> {
    let grid = cfg.grid()?;
    let sc = &cfg.source;
    let times = nodes(-sc.support, sc.support, cfg.time.dt);
    let shapes = cfg
        .modes()?
        .into_iter()
        .map(|m| Ok((m, profile(m, grid, |r| (-(r / sc.radial_width).powi(2)).exp())?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let values = times
        .iter()
        .map(|&t| {
            let a = (-(t / sc.time_width).powi(2)).exp();
            shapes.iter().map(|(m, p)| (*m, p.scaled(a))).collect::<BTreeMap<_, _>>()
        })
        .collect();
    Ok(SourceTerm::new(cfg.dim(), grid, times, values, (-sc.support, sc.support))?)
}

/// A smooth compact radial source with randomized centre, width and time profile.
pub fn random_source(rng: &mut impl Rng, dim: Dimension, grid: Grid, dt: f64) -> Result<SourceTerm, CliError> {
    let mode = ModeIndex::radial(dim);
    let (rc, rw) = (rng.gen_range(0.0..2.0), rng.gen_range(0.5..1.5));
    let tc = rng.gen_range(-1.0..1.0);
    // Whole steps so the support ends on a node.
    let tw = (rng.gen_range(0.5..1.5) / dt).round() * dt;
    let freq = rng.gen_range(0.0..3.0);
    let p = profile(mode, grid, |r| poly_bump(r, rc, rw) * (1.0 + 0.5 * (freq * r).cos()))?;
    let (a, b) = (tc - tw, tc + tw);
    let times = nodes(a, b, dt);
    let values = times
        .iter()
        .map(|&t| {
            let mut slice = BTreeMap::new();
            let amp = poly_bump(t, tc, tw);
            if amp != 0.0 {
                slice.insert(mode, p.scaled(amp));
            }
            slice
        })
        .collect();
    Ok(SourceTerm::new(dim, grid, times, values, (a, b))?)
}

/// Smooth compact data in one mode with randomized bumps in both slots.
pub fn random_state(rng: &mut impl Rng, mode: ModeIndex, grid: Grid) -> Result<CauchyData, CliError> {
    let mut slot = || {
        let c = rng.gen_range(0.5..3.5);
        let w = rng.gen_range(0.4..1.5);
        let amp = rng.gen_range(-1.0..1.0);
        let k = rng.gen_range(0.0..3.0);
        profile(mode, grid, move |r| amp * poly_bump(r, c, w) * (1.0 + 0.5 * (k * r).cos()))
    };
    let field = slot()?;
    let velocity = slot()?;
    Ok(CauchyData::single(field, velocity)?)
}
