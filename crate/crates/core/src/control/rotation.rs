//! Sub-space rotations of a qutrit.
//!
//! Axis convention: `x` rotates |i⟩ toward +|i+1⟩ with real amplitudes,
//! R_x(φ)|i⟩ = cos(φ/2)|i⟩ + sin(φ/2)|i+1⟩, and `y` rotates with an
//! imaginary amplitude, R_y(φ)|i⟩ = cos(φ/2)|i⟩ − i·sin(φ/2)|i+1⟩. In
//! textbook terms the `x` label uses a σ_y generator and the `y` label a
//! σ_x generator. Negative axes reverse the angle.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, UnitaryMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "-x")]
    MinusX,
    #[serde(rename = "-y")]
    MinusY,
}

impl Axis {
    fn sign(self) -> f64 {
        match self {
            Axis::X | Axis::Y => 1.0,
            Axis::MinusX | Axis::MinusY => -1.0,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::MinusX => "-x",
            Axis::MinusY => "-y",
        }
    }
}

/// Neighbouring-level pair a rotation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subspace {
    #[serde(rename = "01")]
    S01,
    #[serde(rename = "12")]
    S12,
}

impl Subspace {
    pub fn lower(self) -> usize {
        match self {
            Subspace::S01 => 0,
            Subspace::S12 => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub subspace: Subspace,
    pub axis: Axis,
    /// Radians, in (−2π, 2π].
    pub angle: f64,
}

impl Rotation {
    pub fn new(subspace: Subspace, axis: Axis, angle: f64) -> Result<Self> {
        if !(angle > -2.0 * PI && angle <= 2.0 * PI + 1e-12) {
            return Err(Error::InvalidParameter(format!("rotation angle {angle} outside (−2π, 2π]")));
        }
        Ok(Self { subspace, axis, angle })
    }

    pub fn x01(angle: f64) -> Self {
        Self { subspace: Subspace::S01, axis: Axis::X, angle }
    }

    pub fn y01(angle: f64) -> Self {
        Self { subspace: Subspace::S01, axis: Axis::Y, angle }
    }

    pub fn x12(angle: f64) -> Self {
        Self { subspace: Subspace::S12, axis: Axis::X, angle }
    }

    pub fn y12(angle: f64) -> Self {
        Self { subspace: Subspace::S12, axis: Axis::Y, angle }
    }

    /// 3×3 unitary; identity outside the rotated pair.
    pub fn compile(&self) -> UnitaryMatrix {
        let phi = self.axis.sign() * self.angle;
        let (s, c) = (0.5 * phi).sin_cos();
        let i = self.subspace.lower();
        let mut m = ComplexMatrix::identity(3);
        m[(i, i)] = C64::new(c, 0.0);
        m[(i + 1, i + 1)] = C64::new(c, 0.0);
        match self.axis {
            Axis::X | Axis::MinusX => {
                m[(i + 1, i)] = C64::new(s, 0.0);
                m[(i, i + 1)] = C64::new(-s, 0.0);
            }
            Axis::Y | Axis::MinusY => {
                m[(i + 1, i)] = C64::new(0.0, -s);
                m[(i, i + 1)] = C64::new(0.0, -s);
            }
        }
        UnitaryMatrix::new(m).expect("rotation blocks are unitary")
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pair = match self.subspace {
            Subspace::S01 => "01",
            Subspace::S12 => "12",
        };
        write!(f, "R{pair}{}({})", self.axis.label(), format_angle(self.angle))
    }
}

fn format_angle(angle: f64) -> String {
    let ratio = angle / PI;
    for den in [1.0, 2.0, 4.0] {
        let num = ratio * den;
        if (num - num.round()).abs() < 1e-12 {
            let num = num.round() as i64;
            let head = match num {
                0 => return "0".into(),
                1 => "pi".to_string(),
                -1 => "-pi".to_string(),
                n => format!("{n}pi"),
            };
            return if den == 1.0 { head } else { format!("{head}/{}", den as i64) };
        }
    }
    format!("{angle}")
}
