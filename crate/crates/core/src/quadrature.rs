//! Gauss–Jacobi quadrature on `(0, 1)` against `t^α (1-t)^β dt`, with
//! order doubling until two consecutive rules agree.
//!
//! The endpoint singularities of the weight are absorbed into the rule, so
//! the integrand only has to be smooth.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi};

use crate::error::{Error, Result};
use crate::special::ln_beta;

/// Nodes in `(0, 1)` and weights for `∫ t^α (1-t)^β f(t) dt`.
#[derive(Debug, Clone)]
pub struct JacobiRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl JacobiRule {
    pub fn new(order: usize, alpha: f64, beta: f64) -> Result<Self> {
        let order = NonZeroUsize::new(order).ok_or_else(|| Error::InvalidParameter("quadrature order must be positive".into()))?;
        let param = |v: f64| {
            FiniteAboveNegOneF64::try_from(v).map_err(|_| Error::InvalidParameter(format!("Jacobi exponent {v} must be finite and > -1")))
        };
        // The library's weight is (1-x)^a (1+x)^b on [-1, 1]; with t = (1+x)/2, (1+x) carries α.
        let rule = GaussJacobi::new(order, param(beta)?, param(alpha)?);
        let (nodes, mut weights): (Vec<f64>, Vec<f64>) =
            rule.into_node_weight_pairs().iter().map(|&(x, w)| (0.5 * (1.0 + x), w)).unzip();
        // Renormalize so the rule integrates 1 exactly.
        let raw: f64 = weights.iter().sum();
        let scale = ln_beta(alpha + 1.0, beta + 1.0).exp() / raw;
        weights.iter_mut().for_each(|w| *w *= scale);
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }

    pub fn try_apply<F: FnMut(f64) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut sum = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(t)?;
        }
        Ok(sum)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub min_order: usize,
    pub max_order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-9, min_order: 16, max_order: 1024 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub order: usize,
}

/// Order-doubling integrator for a fixed Jacobi weight. Rules are built on
/// first use and shared across threads.
pub struct AdaptiveJacobi {
    alpha: f64,
    beta: f64,
    config: QuadratureConfig,
    levels: Vec<OnceLock<JacobiRule>>,
}

impl AdaptiveJacobi {
    pub fn new(alpha: f64, beta: f64, config: QuadratureConfig) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) {
            return Err(Error::InvalidParameter(format!("Jacobi exponents ({alpha}, {beta}) must exceed -1")));
        }
        if config.min_order == 0 || config.max_order < config.min_order || !(config.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("invalid quadrature configuration".into()));
        }
        let mut levels = 0;
        let mut order = config.min_order;
        while order <= config.max_order {
            levels += 1;
            order *= 2;
        }
        Ok(Self {
            alpha,
            beta,
            config,
            levels: (0..levels).map(|_| OnceLock::new()).collect(),
        })
    }

    fn rule(&self, level: usize) -> Result<&JacobiRule> {
        if let Some(rule) = self.levels[level].get() {
            return Ok(rule);
        }
        let rule = JacobiRule::new(self.config.min_order << level, self.alpha, self.beta)?;
        Ok(self.levels[level].get_or_init(|| rule))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<Estimate> {
        self.try_integrate(|t| Ok(f(t)))
    }

    pub fn try_integrate<F: FnMut(f64) -> Result<f64>>(&self, mut f: F) -> Result<Estimate> {
        let mut previous = self.rule(0)?.try_apply(&mut f)?;
        let mut error = f64::INFINITY;
        for level in 1..self.levels.len() {
            let rule = self.rule(level)?;
            let current = rule.try_apply(&mut f)?;
            error = (current - previous).abs();
            if error <= self.config.rel_tol * current.abs() {
                return Ok(Estimate { value: current, error, order: rule.order() });
            }
            previous = current;
        }
        Err(Error::QuadratureNonConvergence {
            estimate: error,
            order: self.config.min_order << (self.levels.len() - 1),
        })
    }
}
