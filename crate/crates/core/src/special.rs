//! Log-gamma based special functions used by every closed-form integral in
//! the crate.
//!
//! Everything that feeds an exponent is computed as a *difference* of log-gamma
//! values through [`ln_gamma_ratio`], which keeps the relative error of
//! `exp(...)` near machine precision even when the individual log-gamma values
//! are in the millions.


/// Below this argument the ratio is shifted upward with `ln Γ(z+1) = ln Γ(z) + ln z`
/// before the Stirling series is used.
const STIRLING_MIN: f64 = 16.0;

/// Integer shifts up to this size are evaluated as an explicit product.
const MAX_PRODUCT_SHIFT: f64 = 64.0;

/// Below this, `Γ` itself is finite and ratios are taken in linear space.
const LINEAR_MAX: f64 = 170.0;

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `ln Γ(x + d) - ln Γ(x)` for `x > 0` and `x + d > 0`.
pub fn ln_gamma_ratio(x: f64, d: f64) -> f64 {
    debug_assert!(x > 0.0 && x + d > 0.0, "ln_gamma_ratio({x}, {d}) out of domain");
    if d == 0.0 {
        return 0.0;
    }
    if d.fract() == 0.0 && d.abs() <= MAX_PRODUCT_SHIFT {
        return integer_shift(x, d as i64);
    }
    let lo = x.min(x + d);
    if lo < STIRLING_MIN && x.max(x + d) < LINEAR_MAX {
        return (gamma(x + d) / gamma(x)).ln();
    }
    if lo >= STIRLING_MIN {
        return stirling_ratio(x, d);
    }
    let m = (STIRLING_MIN - lo).ceil() as usize;
    let correction: f64 = (0..m).map(|i| (d / (x + i as f64)).ln_1p()).sum();
    stirling_ratio(x + m as f64, d) - correction
}

fn integer_shift(x: f64, d: i64) -> f64 {
    // Γ(x+d)/Γ(x) = x (x+1) ... (x+d-1) for d > 0; 1 / ((x-1) ... (x-|d|)) for d < 0.
    let (start, step) = if d > 0 { (x, 1.0) } else { (x - 1.0, -1.0) };
    let mut total = 0.0;
    let mut chunk = 1.0;
    for i in 0..d.abs() {
        chunk *= start + step * i as f64;
        if i % 16 == 15 {
            total += chunk.ln();
            chunk = 1.0;
        }
    }
    total += chunk.ln();
    if d > 0 {
        total
    } else {
        -total
    }
}

/// Stirling remainder `ln Γ(z) - [(z - 1/2) ln z - z + ln(2π)/2]`.
fn stirling_tail(z: f64) -> f64 {
    let r = 1.0 / z;
    let r2 = r * r;
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0
                + r2 * (-1.0 / 1680.0
                    + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0 + r2 * (1.0 / 156.0)))))))
}

fn stirling_ratio(x: f64, d: f64) -> f64 {
    // (x+d-1/2) ln(x+d) - (x-1/2) ln x = (x-1/2) ln(1+d/x) + d ln(x+d)
    (x - 0.5) * (d / x).ln_1p() + d * (x + d).ln() - d + (stirling_tail(x + d) - stirling_tail(x))
}

/// `ln B(x, y)` for `x, y > 0`.
pub fn ln_beta(x: f64, y: f64) -> f64 {
    if x + y < LINEAR_MAX {
        return linear_beta(x, y).ln();
    }
    let (small, large) = if x <= y { (x, y) } else { (y, x) };
    ln_gamma(small) - ln_gamma_ratio(large, small)
}

pub fn beta(x: f64, y: f64) -> f64 {
    if x + y < LINEAR_MAX {
        return linear_beta(x, y);
    }
    ln_beta(x, y).exp()
}

fn linear_beta(x: f64, y: f64) -> f64 {
    let (small, large) = if x <= y { (x, y) } else { (y, x) };
    if small + large == 1.0 {
        return std::f64::consts::PI / (std::f64::consts::PI * small).sin();
    }
    gamma(small) * (gamma(large) / gamma(small + large))
}

/// Neumaier-compensated sum; order of `values` is the summation order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
