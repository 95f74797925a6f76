//! Weighted small-deviation series for the Wiener process and its normalised limit.
//!
//! For weights `(r, a)`, threshold `eps` and drift `a_n(eps)` the engine evaluates
//!
//! ```text
//! S(eps) = sum_{n>=1} n^(r-2) (log n)^a P(sup|W| <= sqrt(pi^2/(8 log n)) (eps + a_n(eps)))
//! ```
//!
//! and `lambda^(a+1) S(eps)` with `lambda = eps^-2 - (r-1)`. As `lambda -> 0`
//! the normalised value tends to `(4/pi) exp(2 tau (r-1)^(3/2)) Gamma(a+1)`.
//!
//! Terms `n <= N` are summed exactly. The remainder is handled by
//! Euler-Maclaurin: with `y = ln t` the tail integral becomes
//!
//! ```text
//! (4/pi) e^c int_{ln N}^inf y^a e^{-lambda y} R(y) dy,   c = 2 tau / eps^3,
//! ```
//!
//! where `R(y) -> 1` collects the drift residual and the higher theta terms.
//! The `R = 1` part is an incomplete gamma function; `R - 1` is integrated by
//! adaptive Gauss-Kronrod quadrature.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::brownian::theta_ratio;
use crate::scale::log_e;
use crate::specfun::{gamma_fn, tail_integral};
use crate::sum::ordered_sum;
use crate::{Error, Result};

const FOUR_OVER_PI: f64 = 1.0 / FRAC_PI_4;

/// Exponent pair `(r, a)` weighting the series; `r > 1`, `a > -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeightParams")]
pub struct WeightParams {
    r: f64,
    a: f64,
}

#[derive(Deserialize)]
struct RawWeightParams {
    r: f64,
    a: f64,
}

impl TryFrom<RawWeightParams> for WeightParams {
    type Error = Error;

    fn try_from(raw: RawWeightParams) -> Result<Self> {
        WeightParams::new(raw.r, raw.a)
    }
}

impl WeightParams {
    pub fn new(r: f64, a: f64) -> Result<Self> {
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::argument("r", format!("r > 1 required, got {r}")));
        }
        if !(a > -1.0) || !a.is_finite() {
            return Err(Error::argument("a", format!("a > -1 required, got {a}")));
        }
        Ok(WeightParams { r, a })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `eps^-2 - (r-1)`.
    pub fn lambda(&self, eps: f64) -> f64 {
        1.0 / (eps * eps) - (self.r - 1.0)
    }

    /// Threshold `eps` at which `eps^-2 - (r-1) = lambda`.
    pub fn eps_for_lambda(&self, lambda: f64) -> f64 {
        (lambda + self.r - 1.0).powf(-0.5)
    }

    /// `n^(r-2) (log n)^a`.
    pub fn weight(&self, n: u64) -> f64 {
        let nf = n as f64;
        ((self.r - 2.0) * nf.ln() + self.a * log_e(nf).ln()).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftForm {
    /// `a_n(eps) = 0`.
    Zero,
    /// `a_n(eps) = tau / log n`.
    Canonical,
}

/// Threshold perturbation `a_n(eps)` with `a_n(eps) log n -> tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    pub tau: f64,
    pub form: DriftForm,
}

impl DriftSpec {
    pub fn zero() -> Self {
        DriftSpec {
            tau: 0.0,
            form: DriftForm::Zero,
        }
    }

    pub fn canonical(tau: f64) -> Self {
        DriftSpec {
            tau,
            form: DriftForm::Canonical,
        }
    }

    /// Canonical drift for nonzero `tau`, the zero sequence otherwise.
    pub fn from_tau(tau: f64) -> Self {
        if tau == 0.0 {
            Self::zero()
        } else {
            Self::canonical(tau)
        }
    }

    pub fn a_n(&self, n: u64) -> f64 {
        match self.form {
            DriftForm::Zero => 0.0,
            DriftForm::Canonical => self.tau / log_e(n as f64),
        }
    }

    /// The limit of `a_n(eps) log n`.
    pub fn limit_tau(&self) -> f64 {
        match self.form {
            DriftForm::Zero => 0.0,
            DriftForm::Canonical => self.tau,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// Thresholds `sigma phi(n) eps`.
    Phi,
    /// Thresholds `eps sqrt(n / log n)`.
    SqrtNOverLogN,
}

/// Critical `eps` separating convergence from divergence.
pub fn critical_threshold(params: WeightParams, sigma: f64, scaling: Scaling) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::domain(
            "sigma",
            format!("must be positive, got {sigma}"),
        ));
    }
    let r1 = params.r - 1.0;
    Ok(match scaling {
        Scaling::Phi => 1.0 / r1.sqrt(),
        Scaling::SqrtNOverLogN => sigma * (std::f64::consts::PI.powi(2) / (8.0 * r1)).sqrt(),
    })
}

/// `(4/pi) exp(2 tau (r-1)^(3/2)) Gamma(a+1)`.
pub fn limit_constant(params: WeightParams, tau: f64) -> f64 {
    let g = gamma_fn(params.a + 1.0).expect("a > -1 is enforced by WeightParams");
    FOUR_OVER_PI * (2.0 * tau * (params.r - 1.0).powf(1.5)).exp() * g
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub eps: f64,
    /// Exact sum of the terms `n = 1..=cutoff_n`.
    pub partial_sum: f64,
    /// Euler-Maclaurin estimate of the terms `n > cutoff_n`.
    pub tail_correction: f64,
    pub total: f64,
    /// `lambda^(a+1) * total`.
    pub normalized: f64,
    pub lambda: f64,
    pub cutoff_n: u64,
    pub rel_err_bound: f64,
}

/// Summand of the series as a function of a real index `t >= 1`.
#[derive(Debug, Clone, Copy)]
struct Summand {
    r: f64,
    a: f64,
    eps: f64,
    tau: f64,
    lambda: f64,
}

impl Summand {
    fn new(params: WeightParams, eps: f64, drift: DriftSpec) -> Self {
        Summand {
            r: params.r,
            a: params.a,
            eps,
            tau: drift.limit_tau(),
            lambda: params.lambda(eps),
        }
    }

    #[inline]
    fn shift(&self, log_t: f64) -> f64 {
        self.eps + self.tau / log_t
    }

    /// `pi^2 / (8 x^2)` for the Brownian argument at index `t`.
    #[inline]
    fn exponent(&self, log_t: f64) -> f64 {
        let s = self.shift(log_t);
        log_t / (s * s)
    }

    fn value(&self, t: f64) -> f64 {
        let log_t = log_e(t);
        if !(self.shift(log_t) > 0.0) {
            // P(sup|W| <= x) = 0 for x <= 0.
            return 0.0;
        }
        let e = self.exponent(log_t);
        let (ratio, _) = theta_ratio(e);
        FOUR_OVER_PI * ((self.r - 2.0) * t.ln() + self.a * log_t.ln() - e).exp() * ratio
    }

    /// `t f'(t) / f(t)` for `t > e`.
    fn log_slope(&self, t: f64) -> f64 {
        let log_t = t.ln();
        let s = self.shift(log_t);
        let e = self.exponent(log_t);
        let (ratio, dratio) = theta_ratio(e);
        let de_dlog = 1.0 / (s * s) + 2.0 * self.tau / (log_t * s * s * s);
        (self.r - 2.0) + self.a / log_t + (-1.0 + dratio / ratio) * de_dlog
    }

    /// Leading exponential factor `c = 2 tau / eps^3` of the tail.
    fn drift_exponent(&self) -> f64 {
        2.0 * self.tau / self.eps.powi(3)
    }

    /// `R(y)`: ratio of the exact integrand to `(4/pi) e^c y^a e^{-lambda y}`.
    fn residual_ratio(&self, y: f64) -> f64 {
        let s = self.shift(y);
        let e = self.exponent(y);
        let eps2 = self.eps * self.eps;
        let g = self.tau * (2.0 * self.eps + self.tau / y) / (eps2 * s * s) - self.drift_exponent();
        g.exp() * theta_ratio(e).0
    }

    /// Largest `|R(y) - 1|` contributed by higher theta terms alone, `y >= y0`.
    fn theta_residual_bound(&self, y0: f64) -> f64 {
        (-8.0 * self.exponent(y0)).exp() / 3.0
    }
}

struct Tail {
    value: f64,
    abs_err: f64,
}

/// Estimate of `sum_{n > cutoff} f(n)`.
fn tail_beyond(summand: &Summand, cutoff: u64, rel_tol: f64) -> Result<Tail> {
    let t0 = cutoff as f64;
    let y0 = t0.ln();
    let lead = tail_integral(summand.lambda, summand.a, y0)?;
    let scale = FOUR_OVER_PI * summand.drift_exponent().exp();
    // Quadrature is cheap; a fixed tight target keeps results from getting
    // worse as rel_tol shrinks and the cutoff moves.
    let quad_tol = (1e-3 * rel_tol).min(1e-12) * lead.value;

    let (correction, quad_err) = if summand.tau == 0.0 {
        let bound = summand.theta_residual_bound(y0) * lead.value;
        if bound <= quad_tol {
            (0.0, bound)
        } else {
            residual_integral(summand, y0, quad_tol)?
        }
    } else {
        residual_integral(summand, y0, quad_tol)?
    };
    let integral = scale * (lead.value + correction);

    let f0 = summand.value(t0);
    let slope = summand.log_slope(t0);
    let df0 = f0 * slope / t0;
    // sum_{n>=N} f = int_N^inf f + f(N)/2 - f'(N)/12 + R; drop f(N) itself.
    let value = integral - 0.5 * f0 - df0 / 12.0;
    let p = slope.abs() + 3.0;
    let em_remainder = 2.0 * f0 * p * (p + 1.0) * (p + 2.0) / (720.0 * t0.powi(3));

    Ok(Tail {
        value,
        abs_err: em_remainder + scale * (quad_err + lead.rel_err_bound * lead.value),
    })
}

// Gauss-Kronrod 7-15 nodes and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Returns `(integral, error estimate, integral of |f|)`.
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64, f64) {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut absolute = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (fl, fr) = (f(centre - dx), f(centre + dx));
        kronrod += WGK[j] * (fl + fr);
        absolute += WGK[j] * (fl.abs() + fr.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (fl + fr);
        }
    }
    (
        kronrod * half,
        ((kronrod - gauss) * half).abs(),
        absolute * half.abs(),
    )
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    tol: f64,
    depth: u32,
) -> Result<(f64, f64)> {
    let (value, err, absolute) = gauss_kronrod(f, lo, hi);
    // Below this the estimate is dominated by rounding.
    let floor = 50.0 * f64::EPSILON * absolute;
    if err <= tol.max(floor) {
        return Ok((value, err));
    }
    if depth == 0 {
        return Err(Error::Numerical {
            routine: "tail quadrature",
            reason: format!("panel [{lo}, {hi}] did not reach tolerance {tol:e}"),
        });
    }
    let mid = 0.5 * (lo + hi);
    let (l, el) = adaptive(f, lo, mid, 0.5 * tol, depth - 1)?;
    let (r, er) = adaptive(f, mid, hi, 0.5 * tol, depth - 1)?;
    Ok((l + r, el + er))
}

/// `int_{y0}^inf y^a e^{-lambda y} (R(y) - 1) dy` over doubling panels.
fn residual_integral(summand: &Summand, y0: f64, abs_tol: f64) -> Result<(f64, f64)> {
    let (a, lambda) = (summand.a, summand.lambda);
    let f = |y: f64| (a * y.ln() - lambda * y).exp() * (summand.residual_ratio(y) - 1.0);
    let mut total = 0.0;
    let mut err = 0.0;
    let mut lo = y0;
    for panel in 0..200 {
        let hi = 2.0 * lo;
        let (v, e) = adaptive(&f, lo, hi, abs_tol / 64.0, 30)?;
        total += v;
        err += e;
        // |R - 1| decays in y; twice its value at the cut bounds the remainder.
        let rest =
            tail_integral(lambda, a, hi)?.value * 2.0 * (summand.residual_ratio(hi) - 1.0).abs();
        if rest <= abs_tol / 4.0 || (panel > 0 && rest == 0.0) {
            return Ok((total, err + rest));
        }
        lo = hi;
    }
    Err(Error::Numerical {
        routine: "tail quadrature",
        reason: "panel limit reached".into(),
    })
}

fn validate_eps(params: WeightParams, eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::domain("eps", format!("must be positive, got {eps}")));
    }
    let threshold = critical_threshold(params, 1.0, Scaling::Phi)?;
    if !(params.lambda(eps) > 0.0) {
        return Err(Error::Divergent { eps, threshold });
    }
    Ok(())
}

/// Smallest cutoff meeting the truncation rules for `rel_tol`.
fn choose_cutoff(summand: &Summand, rel_tol: f64) -> Result<u64> {
    let mut n: u64 = 128;
    if summand.tau < 0.0 {
        // Keep eps + tau/log n positive over the whole tail.
        let min_log = 2.0 * summand.tau.abs() / summand.eps;
        while (n as f64).ln() <= min_log {
            n *= 2;
        }
    }
    loop {
        let t = n as f64;
        let y = t.ln();
        let lead = FOUR_OVER_PI
            * summand.drift_exponent().exp()
            * tail_integral(summand.lambda, summand.a, y)?.value;
        let f0 = summand.value(t);
        let slope = summand.log_slope(t);
        let em_first = (f0 * slope / t).abs() / 12.0;
        let asym = summand.theta_residual_bound(y);
        if asym <= rel_tol / 10.0 && em_first <= rel_tol / 10.0 * lead {
            return Ok(n);
        }
        if n >= 1 << 40 {
            return Err(Error::Numerical {
                routine: "weighted_series_wiener",
                reason: format!("no admissible cutoff for rel_tol = {rel_tol:e}"),
            });
        }
        n *= 2;
    }
}

fn assemble(
    params: WeightParams,
    summand: &Summand,
    cutoff: u64,
    partial_sum: f64,
    tail: Tail,
) -> SeriesResult {
    let total = partial_sum + tail.value;
    let lambda = summand.lambda;
    let rounding = 4.0 * f64::EPSILON * (cutoff as f64).log2().max(1.0) * partial_sum;
    SeriesResult {
        eps: summand.eps,
        partial_sum,
        tail_correction: tail.value,
        total,
        normalized: lambda.powf(params.a + 1.0) * total,
        lambda,
        cutoff_n: cutoff,
        rel_err_bound: (tail.abs_err + rounding) / total,
    }
}

/// Weighted Wiener series at `eps`, accurate to `rel_tol` relative.
pub fn weighted_series_wiener(
    params: WeightParams,
    eps: f64,
    drift: DriftSpec,
    rel_tol: f64,
) -> Result<SeriesResult> {
    validate_eps(params, eps)?;
    if !(rel_tol > 0.0 && rel_tol < 0.1) {
        return Err(Error::domain(
            "rel_tol",
            format!("must lie in (0, 0.1), got {rel_tol}"),
        ));
    }
    let summand = Summand::new(params, eps, drift);
    let cutoff = choose_cutoff(&summand, rel_tol)?;
    let partial = ordered_sum(1, cutoff, |n| summand.value(n as f64));
    let tail = tail_beyond(&summand, cutoff, rel_tol)?;
    Ok(assemble(params, &summand, cutoff, partial, tail))
}

/// Series evaluated with a caller-fixed cutoff, for convergence diagnostics.
pub fn weighted_series_wiener_at(
    params: WeightParams,
    eps: f64,
    drift: DriftSpec,
    cutoff: u64,
) -> Result<SeriesResult> {
    series_profile(params, eps, drift, &[cutoff]).map(|mut v| v.remove(0))
}

/// Partial sums and tail-corrected totals at each cutoff of an increasing list.
pub fn series_profile(
    params: WeightParams,
    eps: f64,
    drift: DriftSpec,
    cutoffs: &[u64],
) -> Result<Vec<SeriesResult>> {
    validate_eps(params, eps)?;
    if cutoffs.is_empty() {
        return Err(Error::argument("cutoffs", "empty list"));
    }
    if cutoffs[0] < 3 || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::argument(
            "cutoffs",
            "must be strictly increasing and at least 3",
        ));
    }
    let summand = Summand::new(params, eps, drift);
    if summand.tau < 0.0 && !(summand.shift((cutoffs[0] as f64).ln()) > 0.0) {
        return Err(Error::domain(
            "cutoffs",
            "eps + a_n(eps) must be positive beyond the first cutoff",
        ));
    }
    let mut partial = 0.0;
    let mut prev = 0;
    let mut out = Vec::with_capacity(cutoffs.len());
    for &cutoff in cutoffs {
        partial += ordered_sum(prev + 1, cutoff, |n| summand.value(n as f64));
        prev = cutoff;
        let tail = tail_beyond(&summand, cutoff, 1e-8)?;
        out.push(assemble(params, &summand, cutoff, partial, tail));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub lambda: f64,
    pub eps: f64,
    pub normalized: f64,
    pub rel_err_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitProbe {
    pub rows: Vec<ProbeRow>,
    /// First-order Richardson estimate from the two smallest `lambda`.
    pub richardson: Option<f64>,
    /// Extrapolated limit under [`LimitProbe::model`].
    pub extrapolated: f64,
    /// Error expansion assumed by the extrapolation.
    pub model: String,
    /// `(4/pi) exp(2 tau (r-1)^(3/2)) Gamma(a+1)`.
    pub analytic: f64,
    /// `extrapolated / analytic - 1`.
    pub rel_deviation: f64,
    pub tolerance: f64,
    pub agrees: bool,
}

/// Evaluate the normalised series along a decreasing `lambda` schedule and
/// extrapolate to `lambda = 0`.
pub fn limit_probe(
    params: WeightParams,
    drift: DriftSpec,
    schedule: &[f64],
    rel_tol: f64,
    agreement_tol: f64,
) -> Result<LimitProbe> {
    if schedule.is_empty() {
        return Err(Error::argument("lambdas", "empty schedule"));
    }
    if schedule.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::argument("lambdas", "every lambda must be positive"));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::argument(
            "lambdas",
            "schedule must be strictly decreasing",
        ));
    }
    if !(agreement_tol > 0.0) {
        return Err(Error::domain(
            "tol",
            format!("must be positive, got {agreement_tol}"),
        ));
    }

    let mut rows = Vec::with_capacity(schedule.len());
    for &lambda in schedule {
        let eps = params.eps_for_lambda(lambda);
        let s = weighted_series_wiener(params, eps, drift, rel_tol)?;
        rows.push(ProbeRow {
            lambda,
            eps,
            normalized: s.normalized,
            rel_err_bound: s.rel_err_bound,
        });
    }

    let lambdas: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let values: Vec<f64> = rows.iter().map(|r| r.normalized).collect();
    let richardson = richardson_first_order(&lambdas, &values);
    let (extrapolated, model) = extrapolate(&lambdas, &values)?;
    let analytic = limit_constant(params, drift.limit_tau());
    let rel_deviation = extrapolated / analytic - 1.0;
    Ok(LimitProbe {
        rows,
        richardson,
        extrapolated,
        model: model.to_string(),
        analytic,
        rel_deviation,
        tolerance: agreement_tol,
        agrees: rel_deviation.abs() <= agreement_tol,
    })
}

/// `v2 + (v2 - v1) lambda2 / (lambda1 - lambda2)` on the last two points.
pub fn richardson_first_order(lambdas: &[f64], values: &[f64]) -> Option<f64> {
    let k = lambdas.len();
    if k < 2 {
        return None;
    }
    let (l1, l2) = (lambdas[k - 2], lambdas[k - 1]);
    let (v1, v2) = (values[k - 2], values[k - 1]);
    Some(v2 + (v2 - v1) * l2 / (l1 - l2))
}

/// Fit `v(lambda) = L + c1 lambda + c2 lambda ln(lambda) + c3 lambda^2`
/// through the last (at most four) points, dropping higher basis functions
/// when fewer points are available, and return `L`.
pub fn extrapolate(lambdas: &[f64], values: &[f64]) -> Result<(f64, &'static str)> {
    let k = lambdas.len().min(4);
    let start = lambdas.len() - k;
    let (ls, vs) = (&lambdas[start..], &values[start..]);
    let model = match k {
        0 => return Err(Error::argument("lambdas", "empty schedule")),
        1 => return Ok((vs[0], "none")),
        2 => "1 + lambda",
        3 => "1 + lambda + lambda*ln(lambda)",
        _ => "1 + lambda + lambda*ln(lambda) + lambda^2",
    };
    let basis = |l: f64| [1.0, l, l * l.ln(), l * l];
    let mut m: Vec<Vec<f64>> = ls
        .iter()
        .zip(vs)
        .map(|(&l, &v)| {
            let mut row: Vec<f64> = basis(l)[..k].to_vec();
            row.push(v);
            row
        })
        .collect();
    let coeffs = solve_dense(&mut m)?;
    Ok((coeffs[0], model))
}

/// Gaussian elimination with partial pivoting on an augmented `k x (k+1)` matrix.
fn solve_dense(m: &mut [Vec<f64>]) -> Result<Vec<f64>> {
    let k = m.len();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot][col].abs() < 1e-300 {
            return Err(Error::Numerical {
                routine: "extrapolate",
                reason: "singular system".into(),
            });
        }
        m.swap(col, pivot);
        for row in col + 1..k {
            let factor = m[row][col] / m[col][col];
            let pivot_row = m[col].clone();
            for (dst, src) in m[row][col..=k].iter_mut().zip(&pivot_row[col..=k]) {
                *dst -= factor * src;
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut acc = m[row][k];
        for c in row + 1..k {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}
