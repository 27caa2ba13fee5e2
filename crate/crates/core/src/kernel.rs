//! Entries `C^μ_{n,k} = binom(n+k, k) ∫ (1-t)^n t^k dμ(t)` of the generalized
//! Hilbert matrix, finite sections, and the split into the part living on
//! `(0, 1)` and the endpoint-atom part.
//!
//! A Jacobi term `c t^α (1-t)^β` contributes
//! `c · Γ(n+k+1) Γ(k+α+1) Γ(n+β+1) / (Γ(n+1) Γ(k+1) Γ(n+k+α+β+2))`, which is
//! evaluated as `exp` of three log-gamma ratios so nothing overflows even when
//! `binom(n+k, k)` alone would.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Atom, JacobiTerm, Measure};
use crate::special::{compensated_sum, ln_factorial, ln_gamma_ratio};

/// Largest finite section built by default (~2 GiB of `f64`).
pub const DEFAULT_SECTION_CAP: usize = 16384;

/// Entry contributions at or above this count are summed with compensation.
const COMPENSATION_THRESHOLD: usize = 16;

/// `ln binom(n+k, k)`.
pub fn log_binomial(n: u64, k: u64) -> f64 {
    let (lo, hi) = if n <= k { (n, k) } else { (k, n) };
    ln_gamma_ratio(hi as f64 + 1.0, lo as f64) - ln_factorial(lo)
}

fn jacobi_log_parts(term: &JacobiTerm, n: usize, k: usize) -> (f64, f64, f64) {
    (
        ln_gamma_ratio(k as f64 + 1.0, term.alpha),
        ln_gamma_ratio(n as f64 + 1.0, term.beta),
        -ln_gamma_ratio((n + k) as f64 + 1.0, term.alpha + term.beta + 1.0),
    )
}

#[inline]
fn jacobi_contribution(coeff: f64, row_part: f64, col_part: f64, diag_part: f64) -> f64 {
    coeff * ((col_part + row_part) + diag_part).exp()
}

/// `mass · binom(n+k,k) (1-s)^n s^k`, with `0^0 = 1` at the endpoints.
fn atom_contribution(atom: &Atom, n: usize, k: usize) -> f64 {
    let s = atom.location;
    if s == 0.0 {
        return if k == 0 { atom.mass } else { 0.0 };
    }
    if s == 1.0 {
        return if n == 0 { atom.mass } else { 0.0 };
    }
    let log = log_binomial(n as u64, k as u64) + n as f64 * (-s).ln_1p() + k as f64 * s.ln();
    atom.mass * log.exp()
}

fn combine(parts: &[f64]) -> f64 {
    if parts.len() >= COMPENSATION_THRESHOLD {
        compensated_sum(parts.iter().copied())
    } else {
        parts.iter().fold(0.0, |acc, v| acc + v)
    }
}

/// `C^μ_{n,k}`.
pub fn entry(mu: &Measure, n: usize, k: usize) -> f64 {
    let mut parts = Vec::with_capacity(mu.terms().len() + mu.atoms().len());
    for term in mu.terms() {
        let (col, row, diag) = jacobi_log_parts(term, n, k);
        parts.push(jacobi_contribution(term.coeff, row, col, diag));
    }
    for atom in mu.atoms() {
        parts.push(atom_contribution(atom, n, k));
    }
    combine(&parts)
}

/// Log-gamma ratios cached per row, column, and anti-diagonal so that a block
/// of entries costs one `exp` per Jacobi term. Results are bit-identical to
/// [`entry`].
pub(crate) struct KernelPlan<'a> {
    mu: &'a Measure,
    tables: Vec<TermTables>,
}

struct TermTables {
    coeff: f64,
    by_col: Vec<f64>,
    by_row: Vec<f64>,
    by_diag: Vec<f64>,
}

impl<'a> KernelPlan<'a> {
    pub(crate) fn new(mu: &'a Measure, rows: usize, cols: usize) -> Self {
        let diag = (rows + cols).saturating_sub(1);
        let tables = mu
            .terms()
            .iter()
            .map(|t| TermTables {
                coeff: t.coeff,
                by_col: (0..cols).map(|k| ln_gamma_ratio(k as f64 + 1.0, t.alpha)).collect(),
                by_row: (0..rows).map(|n| ln_gamma_ratio(n as f64 + 1.0, t.beta)).collect(),
                by_diag: (0..diag).map(|s| -ln_gamma_ratio(s as f64 + 1.0, t.alpha + t.beta + 1.0)).collect(),
            })
            .collect();
        Self { mu, tables }
    }

    /// Entry `(n, k)`; `scratch` avoids an allocation per entry.
    pub(crate) fn entry(&self, n: usize, k: usize, scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        for t in &self.tables {
            scratch.push(jacobi_contribution(t.coeff, t.by_row[n], t.by_col[k], t.by_diag[n + k]));
        }
        for atom in self.mu.atoms() {
            scratch.push(atom_contribution(atom, n, k));
        }
        combine(scratch)
    }
}

/// Leading `size × size` block of `C^μ`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSection {
    size: usize,
    entries: Vec<f64>,
}

impl FiniteSection {
    pub fn from_row_major(size: usize, entries: Vec<f64>) -> Result<Self> {
        if size == 0 || entries.len() != size * size {
            return Err(Error::Format {
                what: "finite section",
                message: format!("expected {size}×{size} entries, got {}", entries.len()),
            });
        }
        Ok(Self { size, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.entries[n * self.size + k]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.entries[n * self.size..(n + 1) * self.size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.size)
    }

    /// `A x`, rows in parallel, each row summed left to right.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.size);
        self.entries
            .par_chunks(self.size)
            .map(|row| row.iter().zip(x).fold(0.0, |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// `Aᵀ y`, column blocks in parallel, each column summed top to bottom.
    pub fn transpose_matvec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.size);
        const BLOCK: usize = 256;
        let mut out = vec![0.0; self.size];
        out.par_chunks_mut(BLOCK).enumerate().for_each(|(b, chunk)| {
            let start = b * BLOCK;
            for (n, &yn) in y.iter().enumerate() {
                let row = &self.entries[n * self.size + start..n * self.size + start + chunk.len()];
                for (o, a) in chunk.iter_mut().zip(row) {
                    *o += a * yn;
                }
            }
        });
        out
    }
}

pub fn finite_section(mu: &Measure, size: usize) -> Result<FiniteSection> {
    finite_section_with_cap(mu, size, DEFAULT_SECTION_CAP)
}

pub fn finite_section_with_cap(mu: &Measure, size: usize, cap: usize) -> Result<FiniteSection> {
    if size == 0 {
        return Err(Error::InvalidParameter("section size must be at least 1".into()));
    }
    if size > cap {
        return Err(Error::ResourceLimit { what: "section size", requested: size, cap });
    }
    let plan = KernelPlan::new(mu, size, size);
    let mut entries = vec![0.0; size * size];
    entries.par_chunks_mut(size).enumerate().for_each(|(n, row)| {
        let mut scratch = Vec::new();
        for (k, slot) in row.iter_mut().enumerate() {
            *slot = plan.entry(n, k, &mut scratch);
        }
    });
    Ok(FiniteSection { size, entries })
}

/// `C^μ = C̃^μ + Ĉ^μ`: the matrix of `μ` restricted to `(0, 1)` plus the
/// matrix generated by the endpoint masses.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub smooth: Measure,
    pub c0: f64,
    pub c1: f64,
}

impl Decomposition {
    /// `Ĉ_{n,k}`: `c0` down the first column, `c1` along the first row.
    pub fn atomic_entry(&self, n: usize, k: usize) -> f64 {
        let mut v = 0.0;
        if k == 0 {
            v += self.c0;
        }
        if n == 0 {
            v += self.c1;
        }
        v
    }

    pub fn smooth_entry(&self, n: usize, k: usize) -> f64 {
        entry(&self.smooth, n, k)
    }
}

pub fn decompose(mu: &Measure) -> Decomposition {
    let (c0, c1) = mu.endpoint_masses();
    Decomposition { smooth: mu.interior(), c0, c1 }
}
