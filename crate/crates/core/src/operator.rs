//! Applying `C^μ` to finite sequences.
//!
//! Two independent routes are kept on purpose: the entrywise truncated
//! product (`apply_truncated`) and integration of
//! `e_n(t) = Σ_m binom(n+m, m) t^m (1-t)^n a_m` against the measure
//! (`apply_via_quadrature`). For the Lebesgue measure the matrix is Hankel and
//! `hankel_fast_apply` does the product with an FFT.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::kernel::{log_binomial, KernelPlan, DEFAULT_SECTION_CAP};
use crate::measure::Measure;
use crate::norm::{lp_norm, PExponent};
use crate::quadrature::{AdaptiveJacobi, QuadratureConfig};

/// Largest `n_rows` or input length accepted by the FFT path.
pub const HANKEL_CAP: usize = 1 << 22;

/// Terms `a_0 .. a_{K-1}` of a sequence, zero beyond.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SequenceVector {
    values: Vec<f64>,
    nonneg: bool,
}

impl SequenceVector {
    pub fn new(values: Vec<f64>) -> Self {
        let nonneg = values.iter().all(|&v| v >= 0.0);
        Self { values, nonneg }
    }

    /// Like [`SequenceVector::new`] but rejects negative terms.
    pub fn nonnegative(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("term {i} is negative or NaN: {}", values[i])));
        }
        Ok(Self { values, nonneg: true })
    }

    pub fn zeros(len: usize) -> Self {
        Self { values: vec![0.0; len], nonneg: true }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }

    pub fn norm(&self, p: PExponent) -> f64 {
        lp_norm(&self.values, p)
    }
}

impl From<Vec<f64>> for SequenceVector {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

/// Truncation policy for the series defining `e_n(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnEvalConfig {
    pub tail_tol: f64,
    pub max_terms: usize,
}

impl Default for EnEvalConfig {
    fn default() -> Self {
        Self { tail_tol: 1e-12, max_terms: 10_000_000 }
    }
}

impl EnEvalConfig {
    pub fn new(tail_tol: f64, max_terms: usize) -> Result<Self> {
        if !(tail_tol > 0.0) || max_terms == 0 {
            return Err(Error::InvalidParameter("tail_tol must be positive and max_terms at least 1".into()));
        }
        Ok(Self { tail_tol, max_terms })
    }
}

/// Re-anchor the running log-binomial every this many terms.
const REANCHOR: usize = 256;

/// Evaluates `e_n(t)` for one stored sequence; caches the suffix maxima of
/// `|a_m|` used by the tail bound.
pub struct EnEvaluator<'a> {
    a: &'a [f64],
    suffix_max: Vec<f64>,
    cfg: EnEvalConfig,
}

impl<'a> EnEvaluator<'a> {
    pub fn new(a: &'a SequenceVector, cfg: EnEvalConfig) -> Self {
        let a = a.values();
        let mut suffix_max = vec![0.0f64; a.len() + 1];
        for m in (0..a.len()).rev() {
            suffix_max[m] = suffix_max[m + 1].max(a[m].abs());
        }
        Self { a, suffix_max, cfg }
    }

    pub fn eval(&self, n: usize, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("e_n is defined on [0, 1], got t = {t}")));
        }
        let a = self.a;
        if a.is_empty() {
            return Ok(0.0);
        }
        if t == 0.0 {
            return Ok(a[0]);
        }
        if t == 1.0 {
            // (1-t)^n kills every term for n >= 1; for n = 0 every weight is 1.
            return Ok(if n == 0 { a.iter().sum() } else { 0.0 });
        }
        let ln_t = t.ln();
        let ln_1mt = (-t).ln_1p();
        let nf = n as f64;
        let limit = a.len().min(self.cfg.max_terms);
        let mut log_weight = 0.0;
        let mut sum = 0.0;
        for (m, &am) in a[..limit].iter().enumerate() {
            if m % REANCHOR == 0 {
                log_weight = log_binomial(n as u64, m as u64) + m as f64 * ln_t + nf * ln_1mt;
            }
            if am != 0.0 {
                sum += am * log_weight.exp();
            }
            log_weight += ln_t + (nf / (m as f64 + 1.0)).ln_1p();
        }
        if limit == a.len() {
            return Ok(sum);
        }
        // Binomial weights B_m have ratio t (m+n+1)/(m+1), decreasing to t; once
        // below r* = (1+t)/2 the rest is dominated by a geometric series.
        let safe_ratio = 0.5 * (1.0 + t);
        let ratio = t * (limit as f64 + nf + 1.0) / (limit as f64 + 1.0);
        let tail_bound = if ratio <= safe_ratio {
            log_weight.exp() / (1.0 - safe_ratio) * self.suffix_max[limit]
        } else {
            f64::INFINITY
        };
        if tail_bound < self.cfg.tail_tol {
            Ok(sum)
        } else {
            Err(Error::MaxTermsExceeded { max_terms: self.cfg.max_terms, tail_bound })
        }
    }
}

/// `e_n(t) = Σ_m binom(n+m, m) t^m (1-t)^n a_m`.
pub fn eval_en(n: usize, t: f64, a: &SequenceVector, cfg: EnEvalConfig) -> Result<f64> {
    EnEvaluator::new(a, cfg).eval(n, t)
}

/// `d_n = Σ_{k<K} C^μ_{n,k} a_k` for `n < n_rows`.
pub fn apply_truncated(mu: &Measure, a: &SequenceVector, n_rows: usize) -> Result<SequenceVector> {
    apply_truncated_with_cap(mu, a, n_rows, DEFAULT_SECTION_CAP)
}

pub fn apply_truncated_with_cap(mu: &Measure, a: &SequenceVector, n_rows: usize, cap: usize) -> Result<SequenceVector> {
    check_rows(n_rows, cap)?;
    let values = a.values();
    let plan = KernelPlan::new(mu, n_rows, values.len());
    let out: Vec<f64> = (0..n_rows)
        .into_par_iter()
        .map_init(Vec::new, |scratch, n| {
            let mut acc = 0.0;
            for (k, &ak) in values.iter().enumerate() {
                if ak != 0.0 {
                    acc += plan.entry(n, k, scratch) * ak;
                }
            }
            acc
        })
        .collect();
    Ok(SequenceVector::new(out))
}

fn check_rows(n_rows: usize, cap: usize) -> Result<()> {
    if n_rows == 0 {
        return Err(Error::InvalidParameter("n_rows must be at least 1".into()));
    }
    if n_rows > cap {
        return Err(Error::ResourceLimit { what: "row count", requested: n_rows, cap });
    }
    Ok(())
}

/// `b_n = ∫ e_n dμ`: Gauss–Jacobi quadrature for each Jacobi term, point
/// evaluations for the atoms (`e_n(0) = a_0`, `e_n(1) = Σ a_m` for `n = 0`).
pub fn apply_via_quadrature(mu: &Measure, a: &SequenceVector, n_rows: usize, cfg: EnEvalConfig) -> Result<SequenceVector> {
    check_rows(n_rows, DEFAULT_SECTION_CAP)?;
    let evaluator = EnEvaluator::new(a, cfg);
    let integrators = mu
        .terms()
        .iter()
        .map(|t| AdaptiveJacobi::new(t.alpha, t.beta, QuadratureConfig::default()))
        .collect::<Result<Vec<_>>>()?;
    let out = (0..n_rows)
        .into_par_iter()
        .map(|n| {
            let mut b = 0.0;
            for (term, q) in mu.terms().iter().zip(&integrators) {
                b += term.coeff * q.try_integrate(|t| evaluator.eval(n, t))?.value;
            }
            for atom in mu.atoms() {
                b += atom.mass * evaluator.eval(n, atom.location)?;
            }
            Ok(b)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SequenceVector::new(out))
}

/// Precomputed FFT of the Hankel symbol `h_s = 1/(s+1)` for a fixed shape.
pub struct HankelPlan {
    n_rows: usize,
    n_cols: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    symbol: Vec<Complex<f64>>,
}

impl HankelPlan {
    /// Plan for `n_rows × n_cols` leading blocks of `1/(n+k+1)`.
    pub fn new(n_rows: usize, n_cols: usize) -> Result<Self> {
        if n_rows == 0 {
            return Err(Error::InvalidParameter("n_rows must be at least 1".into()));
        }
        for (what, v) in [("row count", n_rows), ("sequence length", n_cols)] {
            if v > HANKEL_CAP {
                return Err(Error::ResourceLimit { what, requested: v, cap: HANKEL_CAP });
            }
        }
        let len = (n_rows + n_cols.max(1) - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(len);
        let ifft = planner.plan_fft_inverse(len);
        let mut symbol = vec![Complex::new(0.0, 0.0); len];
        for (s, slot) in symbol.iter_mut().take(n_rows + n_cols.max(1) - 1).enumerate() {
            slot.re = 1.0 / (s as f64 + 1.0);
        }
        fft.process(&mut symbol);
        Ok(Self { n_rows, n_cols, fft, ifft, symbol })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// `d_n = Σ_k a_k / (n+k+1)`; `a` must have exactly `n_cols` terms.
    pub fn apply(&self, a: &[f64]) -> Vec<f64> {
        assert_eq!(a.len(), self.n_cols, "sequence length does not match the plan");
        let k = self.n_cols;
        if k == 0 {
            return vec![0.0; self.n_rows];
        }
        let len = self.symbol.len();
        // Correlation as convolution with the reversed input: d_n sits at index n + K - 1.
        let mut buf = vec![Complex::new(0.0, 0.0); len];
        for (j, &v) in a.iter().rev().enumerate() {
            buf[j].re = v;
        }
        self.fft.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.symbol) {
            *b *= s;
        }
        self.ifft.process(&mut buf);
        let scale = 1.0 / len as f64;
        buf[k - 1..k - 1 + self.n_rows].iter().map(|c| c.re * scale).collect()
    }
}

/// Classical Hilbert matrix times `a`, first `n_rows` rows, in `O(M log M)`.
pub fn hankel_fast_apply(a: &SequenceVector, n_rows: usize) -> Result<SequenceVector> {
    let plan = HankelPlan::new(n_rows, a.len())?;
    let mut out = plan.apply(a.values());
    if a.is_nonneg() {
        // Round-off can leave tiny negatives where the exact product is >= 0.
        out.iter_mut().for_each(|v| *v = v.max(0.0));
    }
    Ok(SequenceVector::new(out))
}

/// Uses the FFT path when `mu` is a multiple of Lebesgue measure.
pub fn apply_auto(mu: &Measure, a: &SequenceVector, n_rows: usize) -> Result<SequenceVector> {
    match mu.as_scaled_lebesgue() {
        Some(c) => {
            let d = hankel_fast_apply(a, n_rows)?;
            Ok(SequenceVector::new(d.into_values().into_iter().map(|v| c * v).collect()))
        }
        None => apply_truncated(mu, a, n_rows),
    }
}
