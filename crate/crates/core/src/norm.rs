//! Boundedness of `C^μ` on `ℓ^p` and its exact operator norm.
//!
//! Without endpoint atoms the norm is
//! `N^μ_p = ∫ t^{-1/p} (1-t)^{1/p-1} dμ(t)` (for `p = ∞`, `∫ (1-t)^{-1} dμ`),
//! and the operator is bounded exactly when that integral is finite. Atoms at
//! 0 or 1 change the picture: an atom at 0 is only tolerated on `ℓ^∞`, an
//! atom at 1 only on `ℓ^1`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernel::decompose;
use crate::measure::{Integral, Measure};

/// Exponent `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Self::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Self::Finite(p))
        } else {
            Err(Error::InvalidExponent(format!("p must be a real number >= 1 or inf, got {p}")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Finite(p) => p,
            Self::Infinity => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(p) => Some(p),
            Self::Infinity => None,
        }
    }

    /// Hölder conjugate `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Self {
        match self {
            Self::Infinity => Self::Finite(1.0),
            Self::Finite(p) if p == 1.0 => Self::Infinity,
            Self::Finite(p) => Self::Finite(p / (p - 1.0)),
        }
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Finite(p) => 1.0 / p,
            Self::Infinity => 0.0,
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if ["inf", "infinity", "∞"].iter().any(|k| t.eq_ignore_ascii_case(k)) {
            return Ok(Self::Infinity);
        }
        let p: f64 = t.parse().map_err(|_| Error::InvalidExponent(format!("cannot parse `{s}` as p")))?;
        Self::new(p)
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) => write!(f, "{p}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(p) => s.serialize_f64(*p),
            Self::Infinity => s.serialize_str("inf"),
        }
    }
}

/// `‖x‖_p`, scaled by the largest magnitude so large inputs don't overflow.
pub fn lp_norm(values: &[f64], p: PExponent) -> f64 {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    match p {
        PExponent::Infinity => max,
        _ if max == 0.0 || !max.is_finite() => max,
        PExponent::Finite(p) if p == 1.0 => values.iter().map(|v| v.abs()).sum(),
        PExponent::Finite(p) if p == 2.0 => max * values.iter().map(|v| (v / max) * (v / max)).sum::<f64>().sqrt(),
        PExponent::Finite(p) => max * values.iter().map(|v| (v.abs() / max).powf(p)).sum::<f64>().powf(1.0 / p),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnboundedReason {
    /// The norm integral is infinite.
    DivergentIntegral,
    /// An atom at 0 puts a constant first column in the matrix.
    #[serde(rename = "AtomAtZero_FiniteP")]
    AtomAtZeroFiniteP,
    /// An atom at 1 makes the first output the full sum of the input.
    #[serde(rename = "AtomAtOne_PGreaterThan1")]
    AtomAtOnePGreaterThan1,
    #[serde(rename = "AtomAtOne_PInfinity")]
    AtomAtOnePInfinity,
}

impl fmt::Display for UnboundedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("serializes");
        f.write_str(s.as_str().expect("unit variant"))
    }
}

/// Which closed form produced (or failed to produce) the norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Formula {
    /// `∫ t^{-1/p}(1-t)^{1/p-1} dμ`, no endpoint atoms.
    #[serde(rename = "Interior_Np")]
    InteriorNp,
    /// `∫_(0,1) t^{-1} dμ + c_1`.
    #[serde(rename = "P1_WithAtomAtOne")]
    P1WithAtomAtOne,
    /// `∫_(0,1) (1-t)^{-1} dμ + c_0`.
    #[serde(rename = "PInf_WithAtomAtZero")]
    PInfWithAtomAtZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Status {
    Bounded { norm: f64 },
    Unbounded { reason: UnboundedReason },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormVerdict {
    pub p: PExponent,
    pub status: Status,
    pub formula_used: Option<Formula>,
}

impl NormVerdict {
    pub fn norm(&self) -> Option<f64> {
        match self.status {
            Status::Bounded { norm } => Some(norm),
            Status::Unbounded { .. } => None,
        }
    }

    pub fn reason(&self) -> Option<UnboundedReason> {
        match self.status {
            Status::Unbounded { reason } => Some(reason),
            Status::Bounded { .. } => None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.norm().is_some()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}

#[derive(Serialize)]
struct VerdictRecord {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<UnboundedReason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    formula_used: Option<Formula>,
    p: PExponent,
}

impl Serialize for NormVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VerdictRecord {
            status: if self.is_bounded() { "bounded" } else { "unbounded" },
            norm: self.norm(),
            reason: self.reason(),
            formula_used: self.formula_used,
            p: self.p,
        }
        .serialize(s)
    }
}

/// `N^μ_p` for a measure without endpoint atoms.
pub fn norm_integral(mu: &Measure, p: PExponent) -> Result<Integral> {
    if mu.has_endpoint_atoms() {
        return Err(Error::EndpointAtom);
    }
    Ok(match p {
        PExponent::Finite(p) => mu.beta_kernel_integral(-1.0 / p, 1.0 / p - 1.0, false, false),
        PExponent::Infinity => mu.beta_kernel_integral(0.0, -1.0, false, false),
    })
}

fn from_integral(p: PExponent, integral: Integral, formula: Formula) -> NormVerdict {
    let status = match integral {
        Integral::Finite(norm) => Status::Bounded { norm },
        Integral::Divergent => Status::Unbounded { reason: UnboundedReason::DivergentIntegral },
    };
    NormVerdict { p, status, formula_used: Some(formula) }
}

fn unbounded(p: PExponent, reason: UnboundedReason) -> NormVerdict {
    NormVerdict { p, status: Status::Unbounded { reason }, formula_used: None }
}

/// Decides boundedness on `ℓ^p` and returns the exact norm when bounded.
pub fn classify_boundedness(mu: &Measure, p: PExponent) -> NormVerdict {
    let d = decompose(mu);
    let (c0, c1) = (d.c0, d.c1);
    match p {
        PExponent::Finite(_) if c0 > 0.0 => unbounded(p, UnboundedReason::AtomAtZeroFiniteP),
        PExponent::Finite(pv) if c1 > 0.0 && pv > 1.0 => unbounded(p, UnboundedReason::AtomAtOnePGreaterThan1),
        PExponent::Infinity if c1 > 0.0 => unbounded(p, UnboundedReason::AtomAtOnePInfinity),
        PExponent::Finite(_) if c1 > 0.0 => {
            from_integral(p, mu.beta_kernel_integral(-1.0, 0.0, false, true), Formula::P1WithAtomAtOne)
        }
        PExponent::Infinity if c0 > 0.0 => {
            from_integral(p, mu.beta_kernel_integral(0.0, -1.0, true, false), Formula::PInfWithAtomAtZero)
        }
        _ => {
            let integral = norm_integral(mu, p).expect("no endpoint atoms on this branch");
            from_integral(p, integral, Formula::InteriorNp)
        }
    }
}

/// `π / sin(π/p)`, the sharp constant of Hilbert's inequality, for `1 < p < ∞`.
pub fn classical_constant(p: PExponent) -> Result<f64> {
    match p {
        PExponent::Finite(p) if p > 1.0 => Ok(PI / (PI / p).sin()),
        _ => Err(Error::InvalidExponent(format!(
            "the classical Hilbert operator is unbounded at p = {p}"
        ))),
    }
}
