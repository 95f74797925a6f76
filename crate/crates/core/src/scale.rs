//! Logarithm convention and the small-deviation scaling `phi`.

use std::f64::consts::{E, PI};

/// `ln(max(x, e))`, so that `log_e(x) >= 1` for every `x`.
#[inline]
pub fn log_e(x: f64) -> f64 {
    if x > E {
        x.ln()
    } else {
        1.0
    }
}

/// `log log x = log_e(log_e(x))`.
#[inline]
pub fn log_log_e(x: f64) -> f64 {
    log_e(log_e(x))
}

/// `phi(x) = sqrt(pi^2 x / (8 log x))`.
#[inline]
pub fn phi(x: f64) -> f64 {
    (PI * PI * x / (8.0 * log_e(x))).sqrt()
}

/// Brownian-scale argument `sqrt(pi^2 / (8 log n))` multiplying `eps + a_n(eps)`.
#[inline]
pub fn brownian_scale(n: u64) -> f64 {
    (PI * PI / (8.0 * log_e(n as f64))).sqrt()
}
