//! State container: an 8-byte little-endian header length, a JSON header,
//! then the flat little-endian f64 arrays in header order.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::{CauchyData, Dimension, FieldError, Grid, ModeIndex, ModeState, RadialProfile};

pub const FORMAT: &str = "nonrad-container";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayEntry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mode: Option<ModeIndex>,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub version: u32,
    pub kind: String,
    pub dimension: Dimension,
    pub grid: Grid,
    pub arrays: Vec<ArrayEntry>,
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub header: Header,
    pub data: Vec<Vec<f64>>,
}

impl Container {
    pub fn new(kind: &str, dimension: Dimension, grid: Grid) -> Self {
        Self {
            header: Header {
                format: FORMAT.into(),
                version: VERSION,
                kind: kind.into(),
                dimension,
                grid,
                arrays: Vec::new(),
                provenance: BTreeMap::new(),
            },
            data: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, mode: Option<ModeIndex>, values: Vec<f64>) {
        self.header.arrays.push(ArrayEntry { name: name.into(), mode, len: values.len() });
        self.data.push(values);
    }

    pub fn get(&self, name: &str, mode: Option<&ModeIndex>) -> Option<&[f64]> {
        self.header
            .arrays
            .iter()
            .position(|e| e.name == name && e.mode.as_ref() == mode)
            .map(|i| self.data[i].as_slice())
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<(), FieldError> {
        let json = serde_json::to_vec(&self.header)?;
        w.write_all(&(json.len() as u64).to_le_bytes())?;
        w.write_all(&json)?;
        for arr in &self.data {
            for x in arr {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, FieldError> {
        let mut out = Vec::new();
        self.write_to(&mut out)?;
        Ok(out)
    }

    pub fn read_from(mut r: impl Read) -> Result<Self, FieldError> {
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let len = u64::from_le_bytes(len) as usize;
        let mut json = vec![0u8; len];
        r.read_exact(&mut json)?;
        let header: Header = serde_json::from_slice(&json)?;
        if header.format != FORMAT {
            return Err(FieldError::Container(format!("unknown format tag {:?}", header.format)));
        }
        if header.version != VERSION {
            return Err(FieldError::Container(format!("unsupported version {}", header.version)));
        }
        let mut data = Vec::with_capacity(header.arrays.len());
        let mut buf = [0u8; 8];
        for entry in &header.arrays {
            let mut arr = Vec::with_capacity(entry.len);
            for _ in 0..entry.len {
                r.read_exact(&mut buf)?;
                arr.push(f64::from_le_bytes(buf));
            }
            data.push(arr);
        }
        Ok(Self { header, data })
    }
}

impl CauchyData {
    pub fn to_container(&self) -> Container {
        let mut c = Container::new("cauchy", self.dim, self.grid);
        for (mode, st) in &self.modes {
            for (slot, p) in [("field", &st.field), ("velocity", &st.velocity)] {
                c.push(&format!("{slot}.spectral"), Some(*mode), p.spectral.clone());
                if let Some(phys) = &p.physical {
                    c.push(&format!("{slot}.physical"), Some(*mode), phys.clone());
                }
            }
        }
        c
    }

    pub fn from_container(c: &Container) -> Result<Self, FieldError> {
        if c.header.kind != "cauchy" {
            return Err(FieldError::Container(format!("expected kind \"cauchy\", found {:?}", c.header.kind)));
        }
        let grid = c.header.grid;
        let mut out = CauchyData::empty(c.header.dimension, grid);
        let modes: Vec<ModeIndex> = {
            let mut m: Vec<_> = c.header.arrays.iter().filter_map(|e| e.mode).collect();
            m.dedup();
            m
        };
        for mode in modes {
            let load = |slot: &str| -> Result<RadialProfile, FieldError> {
                let spec = c
                    .get(&format!("{slot}.spectral"), Some(&mode))
                    .ok_or_else(|| FieldError::Container(format!("missing {slot}.spectral for {mode}")))?;
                let p = RadialProfile::from_spectral(mode, grid, spec.to_vec())?;
                match c.get(&format!("{slot}.physical"), Some(&mode)) {
                    Some(phys) => p.with_physical(phys.to_vec()),
                    None => Ok(p),
                }
            };
            out.insert(ModeState { field: load("field")?, velocity: load("velocity")? })?;
        }
        Ok(out)
    }
}
