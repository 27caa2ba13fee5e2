//! Finite positive measures on `[0, 1]`: mixtures of Jacobi densities
//! `c · t^α (1-t)^β dt` plus finitely many point masses.
//!
//! Every integral of `t^a (1-t)^b` against such a measure is a finite sum of
//! Beta functions and point evaluations, so divergence is decided by comparing
//! exponents rather than by watching a number blow up.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_beta;

/// `coeff · t^alpha · (1-t)^beta dt` on `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiTerm {
    pub coeff: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiTerm {
    pub fn new(coeff: f64, alpha: f64, beta: f64) -> Result<Self> {
        let term = Self { coeff, alpha, beta };
        term.validate("jacobi")?;
        Ok(term)
    }

    fn validate(&self, path: &str) -> Result<()> {
        if !(self.coeff.is_finite() && self.coeff > 0.0) {
            return Err(invalid(format!("{path}.coeff"), format!("coefficient must be positive and finite, got {}", self.coeff)));
        }
        if !(self.alpha.is_finite() && self.alpha > -1.0) {
            return Err(invalid(format!("{path}.alpha"), format!("exponent must be > -1 for a finite measure, got {}", self.alpha)));
        }
        if !(self.beta.is_finite() && self.beta > -1.0) {
            return Err(invalid(format!("{path}.beta"), format!("exponent must be > -1 for a finite measure, got {}", self.beta)));
        }
        Ok(())
    }

    /// Mass of the term, `coeff · B(alpha+1, beta+1)`.
    pub fn mass(&self) -> f64 {
        self.coeff * ln_beta(self.alpha + 1.0, self.beta + 1.0).exp()
    }
}

/// Point mass `mass · δ_location`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    #[serde(rename = "t")]
    pub location: f64,
    pub mass: f64,
}

impl Atom {
    pub fn new(location: f64, mass: f64) -> Result<Self> {
        let atom = Self { location, mass };
        atom.validate("atoms")?;
        Ok(atom)
    }

    fn validate(&self, path: &str) -> Result<()> {
        if !(0.0..=1.0).contains(&self.location) {
            return Err(invalid(format!("{path}.t"), format!("atom location must lie in [0, 1], got {}", self.location)));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(invalid(format!("{path}.mass"), format!("atom mass must be positive and finite, got {}", self.mass)));
        }
        Ok(())
    }

    pub fn is_endpoint(&self) -> bool {
        self.location == 0.0 || self.location == 1.0
    }
}

/// Result of integrating a possibly singular kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integral {
    Finite(f64),
    Divergent,
}

impl Integral {
    pub fn finite(self) -> Option<f64> {
        match self {
            Integral::Finite(v) => Some(v),
            Integral::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Integral::Divergent)
    }
}

/// A validated measure. Atom locations are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Measure {
    #[serde(rename = "jacobi")]
    terms: Vec<JacobiTerm>,
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    jacobi: Vec<RawTerm>,
    atoms: Vec<RawAtom>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    coeff: f64,
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    t: f64,
    mass: f64,
}

fn invalid(path: String, message: String) -> Error {
    Error::InvalidField { path, message }
}

impl Measure {
    pub fn new(terms: Vec<JacobiTerm>, atoms: Vec<Atom>) -> Result<Self> {
        for (i, term) in terms.iter().enumerate() {
            term.validate(&format!("jacobi[{i}]"))?;
        }
        for (i, atom) in atoms.iter().enumerate() {
            atom.validate(&format!("atoms[{i}]"))?;
            if atoms[..i].iter().any(|a| a.location == atom.location) {
                return Err(Error::DuplicateAtom {
                    path: format!("atoms[{i}].t"),
                    location: atom.location,
                });
            }
        }
        Ok(Self { terms, atoms })
    }

    /// The zero measure; its operator is identically zero.
    pub fn zero() -> Self {
        Self::default()
    }

    /// Lebesgue measure `dt`, whose operator is the classical Hilbert matrix.
    pub fn lebesgue() -> Self {
        Self::jacobi(1.0, 0.0, 0.0).expect("valid")
    }

    pub fn jacobi(coeff: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(vec![JacobiTerm::new(coeff, alpha, beta)?], vec![])
    }

    pub fn dirac(location: f64, mass: f64) -> Result<Self> {
        Self::new(vec![], vec![Atom::new(location, mass)?])
    }

    pub fn with_term(mut self, coeff: f64, alpha: f64, beta: f64) -> Result<Self> {
        self.terms.push(JacobiTerm::new(coeff, alpha, beta)?);
        Ok(self)
    }

    pub fn with_atom(self, location: f64, mass: f64) -> Result<Self> {
        let mut atoms = self.atoms;
        atoms.push(Atom::new(location, mass)?);
        Self::new(self.terms, atoms)
    }

    pub fn terms(&self) -> &[JacobiTerm] {
        &self.terms
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.atoms.is_empty()
    }

    /// Masses `(c_0, c_1)` of the atoms at 0 and at 1 (zero when absent).
    pub fn endpoint_masses(&self) -> (f64, f64) {
        let mass_at = |s: f64| self.atoms.iter().find(|a| a.location == s).map_or(0.0, |a| a.mass);
        (mass_at(0.0), mass_at(1.0))
    }

    pub fn has_endpoint_atoms(&self) -> bool {
        self.atoms.iter().any(Atom::is_endpoint)
    }

    /// The restriction of the measure to the open interval `(0, 1)`.
    pub fn interior(&self) -> Self {
        Self {
            terms: self.terms.clone(),
            atoms: self.atoms.iter().copied().filter(|a| !a.is_endpoint()).collect(),
        }
    }

    /// Image under `t ↦ 1 - t`.
    pub fn reflected(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| JacobiTerm { coeff: t.coeff, alpha: t.beta, beta: t.alpha })
                .collect(),
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { location: 1.0 - a.location, mass: a.mass })
                .collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor must be positive, got {factor}")));
        }
        Ok(Self {
            terms: self.terms.iter().map(|t| JacobiTerm { coeff: t.coeff * factor, ..*t }).collect(),
            atoms: self.atoms.iter().map(|a| Atom { mass: a.mass * factor, ..*a }).collect(),
        })
    }

    /// `Some(c)` when the measure is `c · dt`, i.e. its matrix is a multiple of
    /// the Hankel matrix `1/(n+k+1)`.
    pub fn as_scaled_lebesgue(&self) -> Option<f64> {
        if self.terms.is_empty() || !self.atoms.is_empty() {
            return None;
        }
        if self.terms.iter().all(|t| t.alpha == 0.0 && t.beta == 0.0) {
            Some(self.terms.iter().map(|t| t.coeff).sum())
        } else {
            None
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.beta_kernel_integral(0.0, 0.0, true, true)
            .finite()
            .expect("a valid measure has finite mass")
    }

    /// `∫ t^a (1-t)^b dμ(t)` over `(0, 1)`, plus the endpoint atoms when requested.
    ///
    /// A Jacobi term contributes `coeff · B(a+α+1, b+β+1)` and diverges unless
    /// `a+α > -1` and `b+β > -1`. An endpoint atom diverges when the kernel is
    /// infinite there (`a < 0` at 0, `b < 0` at 1), using `0^0 = 1`.
    pub fn beta_kernel_integral(&self, a: f64, b: f64, include_zero: bool, include_one: bool) -> Integral {
        let mut total = 0.0;
        for term in &self.terms {
            let x = a + term.alpha + 1.0;
            let y = b + term.beta + 1.0;
            if x <= 0.0 || y <= 0.0 {
                return Integral::Divergent;
            }
            total += term.coeff * ln_beta(x, y).exp();
        }
        for atom in &self.atoms {
            let value = match atom.location {
                s if s == 0.0 => {
                    if !include_zero {
                        continue;
                    }
                    match endpoint_power(a) {
                        Some(v) => v,
                        None => return Integral::Divergent,
                    }
                }
                s if s == 1.0 => {
                    if !include_one {
                        continue;
                    }
                    match endpoint_power(b) {
                        Some(v) => v,
                        None => return Integral::Divergent,
                    }
                }
                s => (a * s.ln() + b * (-s).ln_1p()).exp(),
            };
            total += atom.mass * value;
        }
        Integral::Finite(total)
    }
}

/// `0^e` with `0^0 = 1`; `None` when infinite.
fn endpoint_power(e: f64) -> Option<f64> {
    if e > 0.0 {
        Some(0.0)
    } else if e == 0.0 {
        Some(1.0)
    } else {
        None
    }
}

/// Parses the measure schema:
/// `{"jacobi": [{"coeff", "alpha", "beta"}...], "atoms": [{"t", "mass"}...]}`.
pub fn parse_measure(text: &str) -> Result<Measure> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawMeasure = serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    de.end().map_err(|e| Error::Schema { path: ".".into(), message: e.to_string() })?;
    Measure::new(
        raw.jacobi
            .into_iter()
            .map(|t| JacobiTerm { coeff: t.coeff, alpha: t.alpha, beta: t.beta })
            .collect(),
        raw.atoms.into_iter().map(|a| Atom { location: a.t, mass: a.mass }).collect(),
    )
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_measure(s)
    }
}

impl Measure {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serializes")
    }
}
