#![allow(dead_code)]

use genhilbert::Measure;
use proptest::prelude::*;
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

pub fn term() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.1..3.0f64, -0.9..3.0f64, -0.9..3.0f64)
}

pub fn interior_atom() -> impl Strategy<Value = (f64, f64)> {
    (0.02..0.98f64, 0.1..3.0f64)
}

fn build(terms: Vec<(f64, f64, f64)>, atoms: Vec<(f64, f64)>, c0: Option<f64>, c1: Option<f64>) -> Measure {
    let mut mu = Measure::zero();
    for (c, a, b) in terms {
        mu = mu.with_term(c, a, b).unwrap();
    }
    let mut seen = Vec::new();
    for (s, m) in atoms {
        if seen.iter().all(|&t: &f64| (t - s).abs() > 1e-9) {
            seen.push(s);
            mu = mu.with_atom(s, m).unwrap();
        }
    }
    if let Some(c) = c0 {
        mu = mu.with_atom(0.0, c).unwrap();
    }
    if let Some(c) = c1 {
        mu = mu.with_atom(1.0, c).unwrap();
    }
    mu
}

/// Nonzero measures on the open interval.
pub fn interior_measure() -> impl Strategy<Value = Measure> {
    (prop::collection::vec(term(), 1..4), prop::collection::vec(interior_atom(), 0..3))
        .prop_map(|(t, a)| build(t, a, None, None))
}

/// Measures that may carry atoms at 0 and 1.
pub fn any_measure() -> impl Strategy<Value = Measure> {
    (
        prop::collection::vec(term(), 0..3),
        prop::collection::vec(interior_atom(), 0..3),
        prop::option::of(0.1..3.0f64),
        prop::option::of(0.1..3.0f64),
    )
        .prop_map(|(t, a, c0, c1)| build(t, a, c0, c1))
}

pub fn nonneg_sequence(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0..10.0f64], 1..=max_len)
}

pub fn unit(rng: &mut SplitMix64) -> f64 {
    genhilbert::certify::unit_f64(rng.next_u64())
}

pub fn uniform(rng: &mut SplitMix64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

pub fn below(rng: &mut SplitMix64, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

/// Seeded interior measure: 1 to 3 Jacobi terms and up to 2 interior atoms.
pub fn seeded_interior_measure(rng: &mut SplitMix64) -> Measure {
    let mut mu = Measure::zero();
    for _ in 0..1 + below(rng, 3) {
        let (c, a, b) = (uniform(rng, 0.1, 3.0), uniform(rng, -0.9, 3.0), uniform(rng, -0.9, 3.0));
        mu = mu.with_term(c, a, b).unwrap();
    }
    for i in 0..below(rng, 3) {
        let s = uniform(rng, 0.05, 0.45) + 0.5 * i as f64;
        mu = mu.with_atom(s, uniform(rng, 0.1, 3.0)).unwrap();
    }
    mu
}

pub fn seeded_nonneg(rng: &mut SplitMix64, len: usize) -> Vec<f64> {
    (0..len).map(|_| uniform(rng, 0.0, 5.0)).collect()
}

pub fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// `∫_0^1 exp(g(ln t, ln(1-t))) dt` by tanh-sinh quadrature, halving the step
/// until two levels agree to `1e-13`.
pub fn tanh_sinh<G: Fn(f64, f64) -> f64>(g: G) -> f64 {
    let pi = std::f64::consts::PI;
    // ln(1 + e^y) without overflow
    let softplus = |y: f64| if y > 0.0 { y + (-y).exp().ln_1p() } else { y.exp().ln_1p() };
    let node = |x: f64| {
        let y = pi * x.sinh();
        let (ln_t, ln_u) = (-softplus(-y), -softplus(y));
        let v = (g(ln_t, ln_u) + ln_t + ln_u).exp() * pi * x.cosh();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let x_max = 7.0;
    let mut h = 0.5;
    let mut sum = node(0.0) + (1..=(x_max / h) as usize).map(|k| node(k as f64 * h) + node(-(k as f64) * h)).sum::<f64>();
    let mut previous = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let n = (x_max / h) as usize;
        sum += (1..=n).step_by(2).map(|k| node(k as f64 * h) + node(-(k as f64) * h)).sum::<f64>();
        let current = sum * h;
        if (current - previous).abs() <= 1e-13 * current.abs() {
            return current;
        }
        previous = current;
    }
    previous
}
