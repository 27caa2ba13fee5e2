//! Numerical witnesses for the closed-form norms.
//!
//! Every quantity here is a *lower* bound on the operator norm: the extremal
//! ratio `‖C a‖_p / ‖a‖_p` for `a_n = (n+1)^{-(1/p+ε)}`, and the largest
//! singular value of a finite section. Because all matrix entries are
//! nonnegative, truncating can only shrink these, so a bounded verdict must
//! dominate every number produced here.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernel::{finite_section, FiniteSection};
use crate::measure::Measure;
use crate::norm::{classical_constant, classify_boundedness, lp_norm, NormVerdict, PExponent};
use crate::operator::{apply_auto, HankelPlan, SequenceVector};

/// Slack allowed between a numerical lower bound and the analytic norm.
pub const SOUNDNESS_SLACK: f64 = 1e-6;

/// Test sequence `a_n = (n+1)^{-w}`, `w = 1/p + ε`, of length `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalParams {
    p: f64,
    epsilon: f64,
    length: usize,
}

impl ExtremalParams {
    /// Requires finite `p` and `ε > 0`; for `p > 1` also `w <= 1`, for `p = 1` `ε < 1`.
    pub fn new(p: PExponent, epsilon: f64, length: usize) -> Result<Self> {
        let p = p
            .finite()
            .ok_or_else(|| Error::InvalidParameter("extremal sequences need a finite p".into()))?;
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        if p > 1.0 && 1.0 / p + epsilon > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "w = 1/p + epsilon must not exceed 1 for p > 1, got {}",
                1.0 / p + epsilon
            )));
        }
        if p == 1.0 && epsilon >= 1.0 {
            return Err(Error::InvalidParameter(format!("epsilon must lie below 1 for p = 1, got {epsilon}")));
        }
        if length == 0 {
            return Err(Error::InvalidParameter("sequence length must be at least 1".into()));
        }
        Ok(Self { p, epsilon, length })
    }

    pub fn p(&self) -> PExponent {
        PExponent::Finite(self.p)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn w(&self) -> f64 {
        1.0 / self.p + self.epsilon
    }

    pub fn length(&self) -> usize {
        self.length
    }
}

pub fn extremal_sequence(params: &ExtremalParams) -> SequenceVector {
    let w = params.w();
    SequenceVector::new((0..params.length).map(|n| (n as f64 + 1.0).powf(-w)).collect())
}

/// `‖C^μ a‖_p / ‖a‖_p` over the first `n_rows` outputs for the extremal `a`.
/// Returns `+∞` if the image overflows.
pub fn lower_bound_ratio(mu: &Measure, params: &ExtremalParams, n_rows: usize) -> Result<f64> {
    let a = extremal_sequence(params);
    let d = apply_auto(mu, &a, n_rows)?;
    let num = d.norm(params.p());
    if !num.is_finite() {
        return Ok(f64::INFINITY);
    }
    Ok(num / a.norm(params.p()))
}

/// Square matrix acting on vectors, for power iteration.
pub trait SectionOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn apply_transpose(&self, y: &[f64]) -> Vec<f64>;
}

impl SectionOperator for FiniteSection {
    fn dim(&self) -> usize {
        self.size()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matvec(x)
    }

    fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        self.transpose_matvec(y)
    }
}

/// Matrix-free `c / (n+k+1)` section; symmetric.
pub struct HankelSection {
    plan: HankelPlan,
    scale: f64,
}

impl HankelSection {
    pub fn new(size: usize, scale: f64) -> Result<Self> {
        Ok(Self { plan: HankelPlan::new(size, size)?, scale })
    }
}

impl SectionOperator for HankelSection {
    fn dim(&self) -> usize {
        self.plan.n_rows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.plan.apply(x).into_iter().map(|v| self.scale * v).collect()
    }

    fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        self.apply(y)
    }
}

pub const DEFAULT_POWER_TOL: f64 = 1e-10;
pub const MAX_POWER_ITERATIONS: usize = 100_000;

/// Largest singular value by power iteration on `AᵀA`, starting from the
/// normalized all-ones vector. The returned `‖A v‖` never exceeds `σ_max`.
pub fn sigma_max<O: SectionOperator + ?Sized>(op: &O, tol: f64, max_iterations: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let n = op.dim();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut previous = 0.0;
    for _ in 0..max_iterations {
        let u = op.apply(&v);
        let sigma = lp_norm(&u, PExponent::Finite(2.0));
        if sigma == 0.0 {
            return Ok(0.0);
        }
        let w = op.apply_transpose(&u);
        let w_norm = lp_norm(&w, PExponent::Finite(2.0));
        if (sigma - previous).abs() <= tol * sigma || w_norm == 0.0 {
            return Ok(sigma);
        }
        v = w.into_iter().map(|x| x / w_norm).collect();
        previous = sigma;
    }
    Err(Error::PowerIterationNonConvergence { iterations: max_iterations, last: previous })
}

/// `σ_max` of the `size × size` section of `C^μ`, a lower bound for the `ℓ²` norm.
pub fn p2_section_norm(mu: &Measure, size: usize, tol: f64) -> Result<f64> {
    if size == 0 {
        return Err(Error::InvalidParameter("section size must be at least 1".into()));
    }
    match mu.as_scaled_lebesgue() {
        Some(c) => sigma_max(&HankelSection::new(size, c)?, tol, MAX_POWER_ITERATIONS),
        None => sigma_max(&finite_section(mu, size)?, tol, MAX_POWER_ITERATIONS),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioCell {
    pub epsilon: f64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(serialize_with = "float_or_marker")]
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaPoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub sigma_max: f64,
}

fn float_or_marker<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

/// Analytic value the witnesses are compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Norm(f64),
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub verdict: NormVerdict,
    pub ratios: Vec<RatioCell>,
    pub sigma_max_series: Vec<SigmaPoint>,
}

impl CertificationReport {
    pub fn target(&self) -> Target {
        self.verdict.norm().map_or(Target::Divergent, Target::Norm)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    fn check_invariants(&self) -> Result<()> {
        if let Target::Norm(norm) = self.target() {
            let cap = norm + SOUNDNESS_SLACK;
            if let Some(c) = self.ratios.iter().find(|c| !(c.ratio <= cap)) {
                return Err(Error::ReportInvariant(format!(
                    "ratio {} at (eps={}, K={}, N={}) exceeds the analytic norm {norm}",
                    c.ratio, c.epsilon, c.k, c.n
                )));
            }
            if let Some(s) = self.sigma_max_series.iter().find(|s| !(s.sigma_max <= cap)) {
                return Err(Error::ReportInvariant(format!(
                    "sigma_max {} at N={} exceeds the analytic norm {norm}",
                    s.sigma_max, s.n
                )));
            }
        }
        if let Some(w) = self.sigma_max_series.windows(2).find(|w| w[1].sigma_max < w[0].sigma_max) {
            return Err(Error::ReportInvariant(format!(
                "sigma_max decreased from {} (N={}) to {} (N={})",
                w[0].sigma_max, w[0].n, w[1].sigma_max, w[1].n
            )));
        }
        Ok(())
    }
}

/// `‖C^μ 1‖_∞` over the first `n_rows` outputs for the all-ones input of length `len`.
pub fn constant_sequence_ratio(mu: &Measure, len: usize, n_rows: usize) -> Result<f64> {
    let d = apply_auto(mu, &SequenceVector::new(vec![1.0; len]), n_rows)?;
    Ok(d.norm(PExponent::Infinity))
}

/// Extremal ratios over `eps_grid × size_grid` (with `K = N = size`), plus the
/// `σ_max` series over `size_grid` when `p = 2`. At `p = ∞` the input is the
/// constant sequence, `ε` plays no role and cells carry `epsilon = 0`.
pub fn convergence_sweep(mu: &Measure, p: PExponent, eps_grid: &[f64], size_grid: &[usize]) -> Result<CertificationReport> {
    convergence_sweep_with_tol(mu, p, eps_grid, size_grid, DEFAULT_POWER_TOL)
}

/// [`convergence_sweep`] with an explicit power-iteration tolerance.
pub fn convergence_sweep_with_tol(
    mu: &Measure,
    p: PExponent,
    eps_grid: &[f64],
    size_grid: &[usize],
    tol: f64,
) -> Result<CertificationReport> {
    if eps_grid.is_empty() || size_grid.is_empty() {
        return Err(Error::InvalidParameter("epsilon and size grids must be nonempty".into()));
    }
    if size_grid.contains(&0) {
        return Err(Error::InvalidParameter("sizes must be at least 1".into()));
    }
    if p == PExponent::Infinity {
        let ratios = size_grid
            .par_iter()
            .map(|&n| constant_sequence_ratio(mu, n, n).map(|ratio| RatioCell { epsilon: 0.0, k: n, n, ratio }))
            .collect::<Result<Vec<_>>>()?;
        return finish_report(mu, p, ratios, size_grid, tol);
    }
    let cells = eps_grid
        .iter()
        .flat_map(|&e| size_grid.iter().map(move |&s| (e, s)))
        .map(|(e, s)| ExtremalParams::new(p, e, s).map(|params| (params, s)))
        .collect::<Result<Vec<_>>>()?;
    let ratios = cells
        .par_iter()
        .map(|(params, n)| {
            lower_bound_ratio(mu, params, *n).map(|ratio| RatioCell {
                epsilon: params.epsilon(),
                k: params.length(),
                n: *n,
                ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    finish_report(mu, p, ratios, size_grid, tol)
}

fn finish_report(mu: &Measure, p: PExponent, ratios: Vec<RatioCell>, size_grid: &[usize], tol: f64) -> Result<CertificationReport> {
    let mut sigma_max_series = Vec::new();
    if p == PExponent::Finite(2.0) {
        let mut sizes = size_grid.to_vec();
        sizes.sort_unstable();
        sizes.dedup();
        for n in sizes {
            sigma_max_series.push(SigmaPoint { n, sigma_max: p2_section_norm(mu, n, tol)? });
        }
    }
    let report = CertificationReport {
        verdict: classify_boundedness(mu, p),
        ratios,
        sigma_max_series,
    };
    report.check_invariants()?;
    Ok(report)
}

/// `Σ_n b_n (H a)_n` for the classical Hilbert matrix `H = 1/(n+k+1)`.
pub fn hilbert_bilinear_form(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let ha = if a.len() * b.len() > 1 << 16 {
        HankelPlan::new(b.len(), a.len())?.apply(a)
    } else {
        (0..b.len())
            .map(|n| a.iter().enumerate().map(|(k, v)| v / (n + k + 1) as f64).sum())
            .collect()
    };
    Ok(b.iter().zip(&ha).map(|(x, y)| x * y).sum())
}

/// `Σ b_n (H a)_n / (‖a‖_p ‖b‖_q)` divided by the sharp constant `π / sin(π/p)`.
pub fn hilbert_inequality_ratio(a: &[f64], b: &[f64], p: PExponent) -> Result<f64> {
    let constant = classical_constant(p)?;
    let denom = lp_norm(a, p) * lp_norm(b, p.conjugate());
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(hilbert_bilinear_form(a, b)? / (constant * denom))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HilbertCheck {
    pub p: PExponent,
    pub trials: usize,
    pub seed: u64,
    pub max_len: usize,
    /// Largest `lhs / (C ‖a‖_p ‖b‖_q)` seen.
    pub max_ratio: f64,
    pub violations: usize,
}

/// Maps the top 53 bits of a 64-bit draw to `[0, 1)`.
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Samples `trials` pairs of random nonnegative sequences and checks
/// `Σ b_n (H a)_n <= C_p ‖a‖_p ‖b‖_q + 1e-9`.
///
/// Stream contract: one SplitMix64 generator with state `seed`; for each
/// trial draw `len_a = 1 + x mod max_len`, then `len_a` terms of `a`, then
/// `len_b` likewise and the terms of `b`; every term is `unit_f64(x)`.
pub fn hilbert_inequality_check(p: PExponent, trials: usize, seed: u64, max_len: usize) -> Result<HilbertCheck> {
    if max_len == 0 {
        return Err(Error::InvalidParameter("max_len must be at least 1".into()));
    }
    let constant = classical_constant(p)?;
    let q = p.conjugate();
    let mut rng = SplitMix64::seed_from_u64(seed);
    let draw = |rng: &mut SplitMix64| {
        let len = 1 + (rng.next_u64() % max_len as u64) as usize;
        (0..len).map(|_| unit_f64(rng.next_u64())).collect::<Vec<f64>>()
    };
    let mut max_ratio = 0.0f64;
    let mut violations = 0;
    for _ in 0..trials {
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let lhs = hilbert_bilinear_form(&a, &b)?;
        let rhs = constant * lp_norm(&a, p) * lp_norm(&b, q);
        if lhs > rhs + 1e-9 {
            violations += 1;
        }
        if rhs > 0.0 {
            max_ratio = max_ratio.max(lhs / rhs);
        }
    }
    Ok(HilbertCheck { p, trials, seed, max_len, max_ratio, violations })
}
