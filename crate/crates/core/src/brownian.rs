//! Distribution of `sup_{0<=s<=1} |W(s)|` for a standard Wiener process.
//!
//! ```text
//! P(sup |W| <= x) = (4/pi) sum_{k>=0} (-1)^k/(2k+1) exp(-pi^2 (2k+1)^2 / (8 x^2))
//! ```
//!
//! The summands decrease strictly in magnitude for every `x > 0`, so the
//! first omitted term bounds the truncation error.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::scale::brownian_scale;
use crate::series::DriftSpec;
use crate::{Error, Result};

const FOUR_OVER_PI: f64 = 1.0 / FRAC_PI_4;

/// Beyond this argument `1 - P(sup|W| <= x) <= 4 P(N > x)` underflows to zero.
const SATURATION_X: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrownianCdfResult {
    /// `P(sup|W| <= x)`, clamped to `[0, 1]`.
    pub value: f64,
    /// Number of series terms summed.
    pub k_terms: usize,
    /// Magnitude of the first omitted term (absolute truncation error).
    pub error_bound: f64,
}

#[inline]
fn term_magnitude(k: usize, inv_8x2: f64) -> f64 {
    let m = (2 * k + 1) as f64;
    FOUR_OVER_PI / m * (-(PI * PI) * m * m * inv_8x2).exp()
}

/// `P(sup_{0<=s<=1} |W(s)| <= x)` to absolute accuracy `abs_tol`.
pub fn sup_cdf(x: f64, abs_tol: f64) -> Result<BrownianCdfResult> {
    if !(x > 0.0) {
        return Err(Error::domain("x", format!("must be positive, got {x}")));
    }
    if !(abs_tol > 0.0 && abs_tol < 1.0) {
        return Err(Error::domain(
            "abs_tol",
            format!("must lie in (0, 1), got {abs_tol}"),
        ));
    }
    if x >= SATURATION_X {
        return Ok(BrownianCdfResult {
            value: 1.0,
            k_terms: 0,
            error_bound: 0.0,
        });
    }

    let inv_8x2 = 1.0 / (8.0 * x * x);
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    let mut k = 0;
    let truncation = loop {
        let t = term_magnitude(k, inv_8x2);
        // Always keep the leading term; stop at the first term under tolerance.
        if k > 0 && t <= abs_tol {
            break t;
        }
        magnitude += t;
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        k += 1;
        if t == 0.0 {
            break 0.0;
        }
    };

    // Each term carries a few ulps from exp and the division.
    let rounding = 4.0 * f64::EPSILON * magnitude;
    Ok(BrownianCdfResult {
        value: sum.clamp(0.0, 1.0),
        k_terms: k,
        error_bound: truncation + rounding,
    })
}

/// Leading-order form `(4/pi) exp(-pi^2 / (8 x^2))`, exact as `x -> 0`.
///
/// Exceeds one for large `x`; it is not a distribution function.
pub fn sup_cdf_asymptotic(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("x", format!("must be positive, got {x}")));
    }
    Ok(term_magnitude(0, 1.0 / (8.0 * x * x)))
}

/// `P(sup|W| <= sqrt(pi^2/(8 log n)) (eps + a_n(eps)))`.
pub fn wiener_term_prob(
    n: u64,
    eps: f64,
    drift: DriftSpec,
    abs_tol: f64,
) -> Result<BrownianCdfResult> {
    if n == 0 {
        return Err(Error::domain("n", "must be at least 1"));
    }
    let shifted = eps + drift.a_n(n);
    if !(shifted > 0.0) {
        return Err(Error::domain(
            "eps",
            format!("eps + a_n(eps) must be positive, got {shifted} at n = {n}"),
        ));
    }
    sup_cdf(brownian_scale(n) * shifted, abs_tol)
}

/// Ratio of the full theta series to its leading term, as a function of
/// `e = pi^2 / (8 x^2)`, together with its derivative in `e`.
///
/// `P(sup|W| <= x) = (4/pi) exp(-e) * ratio(e)`. Summed to full double
/// precision relative to the leading term.
pub(crate) fn theta_ratio(e: f64) -> (f64, f64) {
    let mut ratio = 1.0;
    let mut deriv = 0.0;
    let mut k = 1usize;
    loop {
        let m = (2 * k + 1) as f64;
        let gap = m * m - 1.0;
        let t = (-gap * e).exp() / m;
        if t < 1e-18 {
            break;
        }
        if k % 2 == 1 {
            ratio -= t;
            deriv += gap * t;
        } else {
            ratio += t;
            deriv -= gap * t;
        }
        k += 1;
    }
    (ratio, deriv)
}

/// `P(sup|W| <= x)` evaluated through [`theta_ratio`], accurate in relative
/// terms even where the probability is far below any absolute tolerance.
pub(crate) fn sup_cdf_relative(x: f64) -> f64 {
    let e = PI * PI / (8.0 * x * x);
    if e < 0.05 {
        // The ratio series needs many terms here; the absolute form is exact
        // to double precision because the value is close to one.
        return sup_cdf(x, 1e-17).map(|r| r.value).unwrap_or(1.0);
    }
    FOUR_OVER_PI * (-e).exp() * theta_ratio(e).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // mpmath, 40 digits, series through k = 10.
    const CDF_AT_ONE: f64 = 0.370_777_429_799_523_9;
    const CDF_AT_PI_OVER_SQRT8: f64 = 0.468_346_275_450_499_43;

    #[test]
    fn value_at_one() {
        let r = sup_cdf(1.0, 1e-10).unwrap();
        assert!((r.value - CDF_AT_ONE).abs() <= 1e-10);
        // Two leading terms already carry all the mass above 1e-10.
        let two = FOUR_OVER_PI * (-(PI * PI) / 8.0).exp()
            - FOUR_OVER_PI / 3.0 * (-9.0 * PI * PI / 8.0).exp();
        assert!((r.value - two).abs() <= 1e-10);
        assert!(r.error_bound <= 1e-10);
    }

    #[test]
    fn saturates_at_large_x() {
        let r = sup_cdf(100.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-12);
        let r = sup_cdf(20.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-12);
        assert!(r.k_terms > 10);
    }

    #[test]
    fn small_x_matches_leading_term() {
        let x = 0.3;
        let r = sup_cdf(x, 1e-15).unwrap();
        let lead = sup_cdf_asymptotic(x).unwrap();
        assert_relative_eq!(r.value / lead, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn asymptotic_at_unit_exponent() {
        let x = (PI * PI / 8.0).sqrt();
        assert_relative_eq!(
            sup_cdf_asymptotic(x).unwrap(),
            4.0 / (PI * std::f64::consts::E),
            max_relative = 1e-15
        );
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            sup_cdf(-1.0, 1e-10),
            Err(Error::Domain { param: "x", .. })
        ));
        assert!(matches!(
            sup_cdf(0.0, 1e-10),
            Err(Error::Domain { param: "x", .. })
        ));
        assert!(matches!(
            sup_cdf(1.0, 0.0),
            Err(Error::Domain {
                param: "abs_tol",
                ..
            })
        ));
        assert!(matches!(
            sup_cdf(1.0, 1.0),
            Err(Error::Domain {
                param: "abs_tol",
                ..
            })
        ));
        assert!(sup_cdf_asymptotic(0.0).is_err());
    }

    #[test]
    fn wiener_term_at_n_one_uses_log_one() {
        let r = wiener_term_prob(1, 1.0, DriftSpec::zero(), 1e-12).unwrap();
        let direct = sup_cdf(PI / 8f64.sqrt(), 1e-12).unwrap();
        assert_eq!(r, direct);
        assert!((r.value - CDF_AT_PI_OVER_SQRT8).abs() < 1e-12);
    }

    #[test]
    fn wiener_term_decreases_along_exponential_grid() {
        let mut last = 1.0;
        for k in 1..30 {
            let n = (k as f64).exp().ceil() as u64;
            let v = wiener_term_prob(n, 1.0, DriftSpec::zero(), 1e-15)
                .unwrap()
                .value;
            assert!(v <= last);
            last = v;
        }
        assert!(last < 1e-11);
    }

    #[test]
    fn wiener_term_near_power_law() {
        // With eps = 1 and no drift the leading term is exactly (4/pi) n^-1.
        let n = 10_000u64;
        let v = wiener_term_prob(n, 1.0, DriftSpec::zero(), 1e-15)
            .unwrap()
            .value;
        let lead = FOUR_OVER_PI / n as f64;
        assert!((v / lead - 1.0).abs() < 0.02);
        let x = brownian_scale(n);
        assert_relative_eq!(lead, sup_cdf_asymptotic(x).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn wiener_term_rejects_nonpositive_shift() {
        let drift = DriftSpec::canonical(-5.0);
        assert!(matches!(
            wiener_term_prob(100, 0.5, drift, 1e-10),
            Err(Error::Domain { param: "eps", .. })
        ));
    }

    #[test]
    fn relative_form_agrees_with_certified_series() {
        for &x in &[0.2, 0.4, 0.8, 1.0, 1.5, 3.0, 10.0] {
            let a = sup_cdf(x, 1e-16).unwrap().value;
            let b = sup_cdf_relative(x);
            assert!((a - b).abs() <= 1e-15 + 1e-13 * a, "x = {x}: {a} vs {b}");
        }
    }
}
