use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::FieldError;

/// Odd spatial dimension supported by the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Dimension {
    Three,
    Five,
}

impl Dimension {
    pub fn new(d: u32) -> Result<Self, FieldError> {
        match d {
            3 => Ok(Self::Three),
            5 => Ok(Self::Five),
            other => Err(FieldError::Dimension(other)),
        }
    }

    pub fn value(self) -> u32 {
        match self {
            Self::Three => 3,
            Self::Five => 5,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }

    /// Energy-critical exponent (d + 2) / (d - 2).
    pub fn critical_exponent(self) -> f64 {
        let d = self.as_f64();
        (d + 2.0) / (d - 2.0)
    }

    /// Surface area of the unit sphere S^{d-1}.
    pub fn sphere_area(self) -> f64 {
        match self {
            Self::Three => 4.0 * PI,
            Self::Five => 8.0 * PI * PI / 3.0,
        }
    }

    /// Half the number of derivatives in the light-cone transform, (d - 1) / 2.
    pub fn half_order(self) -> u32 {
        (self.value() - 1) / 2
    }

    /// Sign of the range parity of the transform on radial data.
    pub fn range_sign(self) -> f64 {
        if self.value() % 4 == 1 {
            1.0
        } else {
            -1.0
        }
    }
}

impl TryFrom<u32> for Dimension {
    type Error = FieldError;
    fn try_from(d: u32) -> Result<Self, FieldError> {
        Self::new(d)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.value()
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Dimension of the space of degree-l spherical harmonics on S^{d-1}.
pub fn harmonic_dim(l: u32, d: Dimension) -> u64 {
    let l = u64::from(l);
    match d {
        Dimension::Three => 2 * l + 1,
        Dimension::Five => (l + 1) * (l + 2) * (2 * l + 3) / 6,
    }
}

/// One spherical-harmonic channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    pub d: Dimension,
    pub l: u32,
    pub m: u32,
}

impl ModeIndex {
    pub fn new(d: u32, l: u32, m: u32) -> Result<Self, FieldError> {
        let d = Dimension::new(d)?;
        let dim = harmonic_dim(l, d);
        if u64::from(m) >= dim {
            return Err(FieldError::Multiplicity { d: d.value(), l, m, dim });
        }
        Ok(Self { d, l, m })
    }

    pub fn radial(d: Dimension) -> Self {
        Self { d, l: 0, m: 0 }
    }

    /// Riccati–Bessel index n = l + (d - 3) / 2; the Bessel order is n + 1/2.
    pub fn bessel_index(&self) -> usize {
        (self.l + (self.d.value() - 3) / 2) as usize
    }

    /// Antipodal parity (-1)^l of Y_l.
    pub fn parity(&self) -> f64 {
        if self.l % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Eigenvalue l (l + d - 2) of the spherical Laplacian.
    pub fn angular_eigenvalue(&self) -> f64 {
        let l = f64::from(self.l);
        l * (l + self.d.as_f64() - 2.0)
    }

    /// Exponent p with w = r^p v turning the radial measure into dr.
    pub fn radial_weight_power(&self) -> f64 {
        f64::from(self.d.half_order())
    }

    pub fn is_radial(&self) -> bool {
        self.l == 0
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d={}, l={}, m={})", self.d, self.l, self.m)
    }
}

/// Which half of a Cauchy pair a profile lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    /// The Ḣ¹ component u_0.
    Field,
    /// The L² component u_1.
    Velocity,
}
