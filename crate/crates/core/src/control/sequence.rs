//! Pulse sequences, their text syntax and the standard pulse sets.
//!
//! Sequences are written with the rightmost pulse applied first in time,
//! `R12x(pi/2) . R01x(pi)` being "flip 0→1, then split 1 and 2". Internally
//! pulses are stored in time order.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rotation::{Axis, Rotation, Subspace};
use crate::error::{Error, Result};
use crate::qcore::linalg::complete_to_unitary;
use crate::qcore::matrix::{basis_ket, norm};
use crate::qcore::{DensityMatrix, UnitaryMatrix, C64};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PulseSequence {
    /// Time order: `pulses[0]` is applied first.
    pulses: Vec<Rotation>,
}

impl PulseSequence {
    /// Sequence from pulses in time order.
    pub fn from_time_order(pulses: Vec<Rotation>) -> Self {
        Self { pulses }
    }

    /// Sequence from pulses in written order (rightmost applied first).
    pub fn from_written_order(mut pulses: Vec<Rotation>) -> Self {
        pulses.reverse();
        Self { pulses }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn pulses(&self) -> &[Rotation] {
        &self.pulses
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Ordered product; the empty sequence compiles to the identity.
    pub fn compile(&self) -> UnitaryMatrix {
        self.pulses.iter().fold(UnitaryMatrix::identity(3), |acc, p| p.compile().then_after(&acc))
    }

    /// The time-reversed sequence with negated angles, which undoes this one.
    pub fn inverse(&self) -> Self {
        let pulses = self
            .pulses
            .iter()
            .rev()
            .map(|p| {
                // R(±2π) is the same operator, so 2π stays inside the angle range.
                let angle = if p.angle >= 2.0 * PI - 1e-12 { p.angle } else { -p.angle };
                Rotation { angle, ..*p }
            })
            .collect();
        Self { pulses }
    }

    /// The state this sequence prepares from |0⟩.
    pub fn prepare(&self) -> Vec<C64> {
        self.compile().apply(&basis_ket(3, 0))
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pulses.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self.pulses.iter().rev().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(" . "))
    }
}

impl From<PulseSequence> for String {
    fn from(s: PulseSequence) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for PulseSequence {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for PulseSequence {
    type Err = Error;

    /// Parses `R01x(pi) . R12-y(pi/2)`; `I` or an empty string is the
    /// identity.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "I" {
            return Ok(Self::identity());
        }
        let written = trimmed.split(['.', '·']).map(|tok| parse_rotation(tok.trim())).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_written_order(written))
    }
}

fn parse_rotation(tok: &str) -> Result<Rotation> {
    let err = |why: &str| Error::Parse(format!("bad pulse `{tok}`: {why}"));
    let rest = tok.strip_prefix('R').ok_or_else(|| err("expected leading `R`"))?;
    let (subspace, rest) = if let Some(r) = rest.strip_prefix("01") {
        (Subspace::S01, r)
    } else if let Some(r) = rest.strip_prefix("12") {
        (Subspace::S12, r)
    } else {
        return Err(err("subspace must be 01 or 12"));
    };
    let open = rest.find('(').ok_or_else(|| err("missing `(`"))?;
    let axis = match &rest[..open] {
        "x" => Axis::X,
        "y" => Axis::Y,
        "-x" => Axis::MinusX,
        "-y" => Axis::MinusY,
        other => return Err(err(&format!("unknown axis `{other}`"))),
    };
    let inner = rest[open + 1..].strip_suffix(')').ok_or_else(|| err("missing `)`"))?;
    let angle = parse_angle(inner.trim()).ok_or_else(|| err("unreadable angle"))?;
    Rotation::new(subspace, axis, angle).map_err(|e| err(&e.to_string()))
}

/// Angles like `pi`, `-pi/2`, `3pi/4`, `2*pi`, `0.5`.
fn parse_angle(s: &str) -> Option<f64> {
    let s = s.replace(' ', "");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().ok()?),
        None => (s.clone(), 1.0),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().ok()?,
        };
        c * PI
    } else {
        num.parse::<f64>().ok()?
    };
    (den != 0.0).then_some(value / den)
}

/// The nine tomography sequences U_1..U_9, in table order.
pub fn table1_tomography_set() -> Vec<PulseSequence> {
    let x01 = Rotation::x01;
    let y01 = Rotation::y01;
    let x12 = Rotation::x12;
    let y12 = Rotation::y12;
    vec![
        PulseSequence::identity(),
        PulseSequence::from_written_order(vec![x01(PI / 2.0)]),
        PulseSequence::from_written_order(vec![y01(PI / 2.0)]),
        PulseSequence::from_written_order(vec![x01(PI)]),
        PulseSequence::from_written_order(vec![x12(PI / 2.0), x01(PI)]),
        PulseSequence::from_written_order(vec![y12(PI / 2.0), x01(PI)]),
        PulseSequence::from_written_order(vec![x01(PI), x12(PI / 2.0), x01(PI)]),
        PulseSequence::from_written_order(vec![x01(PI), y12(PI / 2.0), x01(PI)]),
        PulseSequence::from_written_order(vec![x01(PI), x12(PI), x01(PI)]),
    ]
}

/// Preparation states obtained by compiling the tomography sequences onto
/// |0⟩.
pub fn table1_preparation_states() -> Vec<DensityMatrix> {
    table1_tomography_set()
        .iter()
        .map(|s| DensityMatrix::pure(&s.prepare()).expect("compiled states are normalized"))
        .collect()
}

/// Pre- and post-rotations that turn a measurement of |0⟩ into a
/// measurement of `v`: `post = U` with `U|0⟩ = v` and `pre = U†`.
#[derive(Debug, Clone)]
pub struct ProjectionProcedure {
    pub pre: UnitaryMatrix,
    pub post: UnitaryMatrix,
}

pub fn projection_procedure(v: &[C64]) -> Result<ProjectionProcedure> {
    if (norm(v) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("ray must have unit norm, got {}", norm(v))));
    }
    let u = UnitaryMatrix::new(complete_to_unitary(v))?;
    Ok(ProjectionProcedure { pre: u.adjoint(), post: u })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::state::ket_overlap;
    use crate::qcore::{apply_channel, ComplexMatrix, KrausChannel};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn two_pi_is_minus_identity_on_block() {
        let s: PulseSequence = "R01x(pi) . R01x(pi)".parse().unwrap();
        let u = s.compile();
        let expected = ComplexMatrix::real_diag(&[-1.0, -1.0, 1.0]);
        assert!(u.matrix().approx_eq(&expected, 1e-14));
    }

    #[test]
    fn table_rows_one_to_six_prepare_printed_states() {
        let set = table1_tomography_set();
        let expected = [
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(H, 0.0), c(H, 0.0), c(0.0, 0.0)],
            vec![c(H, 0.0), c(0.0, -H), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(H, 0.0), c(H, 0.0)],
            vec![c(0.0, 0.0), c(H, 0.0), c(0.0, -H)],
        ];
        for (k, e) in expected.iter().enumerate() {
            let overlap = ket_overlap(&set[k].prepare(), e);
            assert!((overlap - 1.0).abs() < 1e-12, "row {}: overlap {overlap}", k + 1);
        }
    }

    #[test]
    fn rows_seven_to_nine_compile_to_operational_states() {
        let set = table1_tomography_set();
        let expected = [
            vec![c(-H, 0.0), c(0.0, 0.0), c(H, 0.0)],
            vec![c(-H, 0.0), c(0.0, 0.0), c(0.0, -H)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ];
        for (k, e) in expected.iter().enumerate() {
            let overlap = ket_overlap(&set[k + 6].prepare(), e);
            assert!((overlap - 1.0).abs() < 1e-12, "row {}: overlap {overlap}", k + 7);
        }
    }

    #[test]
    fn inverse_undoes_the_sequence() {
        for s in table1_tomography_set() {
            let u = &s.inverse().compile().matrix().clone() * s.compile().matrix();
            assert!(u.approx_eq(&ComplexMatrix::identity(3), 1e-14), "{s}");
        }
        let full: PulseSequence = "R01x(2*pi) . R12-y(pi/2)".parse().unwrap();
        let u = &full.inverse().compile().matrix().clone() * full.compile().matrix();
        assert!(u.approx_eq(&ComplexMatrix::identity(3), 1e-14));
    }

    #[test]
    fn preparations_are_pure() {
        let preps = table1_preparation_states();
        assert_eq!(preps.len(), 9);
        for p in &preps {
            assert!((p.purity() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parser_round_trip() {
        for text in ["I", "R01x(pi)", "R12x(pi/2) . R01x(pi)", "R01-y(pi) . R12-y(pi/2)", "R01y(-pi/2)"] {
            let s: PulseSequence = text.parse().unwrap();
            let again: PulseSequence = s.to_string().parse().unwrap();
            assert_eq!(s, again);
        }
        let s: PulseSequence = "R12x(pi/2) . R01x(pi)".parse().unwrap();
        assert_eq!(s.pulses()[0], Rotation::x01(PI));
        assert!("R02x(pi)".parse::<PulseSequence>().is_err());
        assert!("R01z(pi)".parse::<PulseSequence>().is_err());
        assert!("R01x(banana)".parse::<PulseSequence>().is_err());
        assert!("R01x(3*pi)".parse::<PulseSequence>().is_err());
    }

    #[test]
    fn projection_of_ground_state_is_trivial() {
        let p = projection_procedure(&basis_ket(3, 0)).unwrap();
        assert!(p.post.matrix().approx_eq(&ComplexMatrix::identity(3), 1e-15));
    }

    #[test]
    fn psi1_sandwich_is_realizable_with_pulses() {
        // Rotating ψ1 = (|1⟩+|2⟩)/√2 onto |0⟩ takes two pulses.
        let pre: PulseSequence = "R01-x(pi) . R12-x(pi/2)".parse().unwrap();
        let psi1 = vec![c(0.0, 0.0), c(H, 0.0), c(H, 0.0)];
        let mapped = pre.compile().apply(&psi1);
        assert!((ket_overlap(&mapped, &basis_ket(3, 0)) - 1.0).abs() < 1e-12);

        let proc_ = projection_procedure(&psi1).unwrap();
        let m0 = KrausChannel::new(
            vec![ComplexMatrix::basis_projector(3, 0), ComplexMatrix::real_diag(&[0.0, 1.0, 1.0])],
            Some(vec![1.0, -1.0]),
        )
        .unwrap();
        let by_pulses = m0.conjugated(&pre.compile(), &pre.compile().adjoint()).unwrap();
        let generic = m0.conjugated(&proc_.pre, &proc_.post).unwrap();
        let rho =
            DensityMatrix::pure(&[c(0.3, 0.1), c(0.5, -0.2), c(0.2, 0.7)].map(|z| z / 0.9949874371066199)).unwrap();
        let a = apply_channel(&by_pulses, &rho).unwrap();
        let b = apply_channel(&generic, &rho).unwrap();
        assert!(a.matrix().approx_eq(b.matrix(), 1e-12));
    }
}
