//! Generalized Hilbert matrices `C^μ_{n,k} = binom(n+k, k) ∫ t^k (1-t)^n dμ(t)`
//! for finite positive measures `μ` on `[0, 1]`.
//!
//! The crate builds matrix entries and finite sections, applies the operator
//! to sequences, decides boundedness on `ℓ^p` with the exact norm, and
//! produces numerical lower bounds that witness those norms.

pub mod certify;
pub mod error;
pub mod io;
pub mod kernel;
pub mod measure;
pub mod norm;
pub mod operator;
pub mod quadrature;
pub mod special;

pub use certify::{
    convergence_sweep, convergence_sweep_with_tol, extremal_sequence, hilbert_inequality_check, lower_bound_ratio, p2_section_norm, CertificationReport,
    ExtremalParams, HilbertCheck, Target,
};
pub use error::{Error, Result};
pub use kernel::{entry, finite_section, FiniteSection};
pub use measure::{parse_measure, Atom, Integral, JacobiTerm, Measure};
pub use norm::{classical_constant, classify_boundedness, norm_integral, Formula, NormVerdict, PExponent, Status, UnboundedReason};
pub use operator::{apply_auto, apply_truncated, apply_via_quadrature, eval_en, hankel_fast_apply, EnEvalConfig, SequenceVector};
