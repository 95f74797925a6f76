//! Monte Carlo estimation of `P(M_n <= threshold)` with exact oracles.
//!
//! Sample `i` of a run with seed `s` uses the stream
//! [`StreamRng::for_sample(s, i)`](rng::StreamRng::for_sample), so estimates
//! are pure functions of `(law, n, threshold, samples, seed)`; the worker
//! count only changes how indices are spread over threads. Walks are
//! simulated in unit-variance coordinates and compared against
//! `threshold / sigma`, which makes the outcome of every sample independent
//! of `sigma` as well.

mod law;
mod oracle;
pub mod rng;

pub use law::{IncrementLaw, LawKind, DEFAULT_PARETO_ALPHA};
pub use oracle::{
    gaussian_grid_oracle, rademacher_oracle, rademacher_oracle_ln, GridOracleResult, GRID_MAX_N,
};

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::scale::{log_e, phi};
use crate::series::DriftSpec;
use crate::{Error, Result};
use rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkMaxSample {
    /// `max_{k<=n} |S_k|`.
    pub m_n: f64,
    pub n: u64,
}

/// Draw `n` increments from `rng` and return the running maximum of `|S_k|`.
pub fn sample_walk_max<R: RngCore + ?Sized>(
    law: &IncrementLaw,
    n: u64,
    rng: &mut R,
) -> WalkMaxSample {
    WalkMaxSample {
        m_n: law.sigma * unit_walk_max(law, n, rng),
        n,
    }
}

fn unit_walk_max<R: RngCore + ?Sized>(law: &IncrementLaw, n: u64, rng: &mut R) -> f64 {
    match law.kind {
        LawKind::Rademacher => {
            let mut s = 0i64;
            let mut m = 0i64;
            let mut left = n;
            while left > 0 {
                let bits = rng.next_u64();
                let take = left.min(64);
                for k in 0..take {
                    s += ((bits >> (63 - k)) & 1) as i64 * 2 - 1;
                    m = m.max(s.abs());
                }
                left -= take;
            }
            m as f64
        }
        _ => {
            let mut s = 0.0f64;
            let mut m = 0.0f64;
            for _ in 0..n {
                s += law.sample_unit(rng);
                m = m.max(s.abs());
            }
            m
        }
    }
}

/// Whether `max_{k<=n} |S_k| <= limit` in unit-variance coordinates, stopping
/// at the first exit. Consumes the same stream prefix as [`unit_walk_max`].
fn unit_walk_stays<R: RngCore + ?Sized>(
    law: &IncrementLaw,
    n: u64,
    limit: f64,
    rng: &mut R,
) -> bool {
    match law.kind {
        LawKind::Rademacher => {
            let bound = limit.floor() as i64;
            let mut s = 0i64;
            let mut left = n;
            while left > 0 {
                let bits = rng.next_u64();
                let take = left.min(64);
                for k in 0..take {
                    s += ((bits >> (63 - k)) & 1) as i64 * 2 - 1;
                    if s.abs() > bound {
                        return false;
                    }
                }
                left -= take;
            }
            true
        }
        _ => {
            let mut s = 0.0f64;
            for _ in 0..n {
                s += law.sample_unit(rng);
                if s.abs() > limit {
                    return false;
                }
            }
            true
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub confidence: f64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64, workers: usize, confidence: f64) -> Result<Self> {
        let cfg = McConfig {
            samples,
            seed,
            workers,
            confidence,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.samples < 100 {
            return Err(Error::domain(
                "samples",
                format!("at least 100 samples required, got {}", self.samples),
            ));
        }
        if self.workers == 0 {
            return Err(Error::domain("workers", "at least one worker required"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::domain(
                "confidence",
                format!("must lie in (0, 1), got {}", self.confidence),
            ));
        }
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::argument("workers", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub successes: u64,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    /// Threshold in the law's units.
    pub threshold: f64,
    /// No sample succeeded; `ci_high` is the one-sided Wilson upper bound.
    pub zero_successes: bool,
}

impl MCEstimate {
    fn from_counts(successes: u64, threshold: f64, cfg: &McConfig) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, cfg.samples, cfg.confidence);
        MCEstimate {
            p_hat: successes as f64 / cfg.samples as f64,
            ci_low,
            ci_high,
            confidence: cfg.confidence,
            successes,
            samples: cfg.samples,
            seed: cfg.seed,
            workers: cfg.workers,
            threshold,
            zero_successes: successes == 0,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub fn covers(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(p)
}

/// Wilson score interval for `successes` out of `samples`.
///
/// With no successes the lower end is 0 and the upper end is the one-sided
/// bound at level `confidence`.
pub fn wilson_interval(successes: u64, samples: u64, confidence: f64) -> (f64, f64) {
    let n = samples as f64;
    if successes == 0 {
        let z = normal_quantile(confidence);
        return (0.0, z * z / (n + z * z));
    }
    let z = normal_quantile(0.5 * (1.0 + confidence));
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = p + z2 / (2.0 * n);
    let radius = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = ((centre - radius) / denom).max(0.0);
    let hi = ((centre + radius) / denom).min(1.0);
    // Keep p inside the interval against round-off at the extremes.
    (lo.min(p), hi.max(p))
}

/// Estimate `P(M_n <= threshold)` with `threshold` in the law's units.
pub fn estimate_below(
    law: &IncrementLaw,
    n: u64,
    threshold: f64,
    cfg: &McConfig,
) -> Result<MCEstimate> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::domain("n", "must be at least 1"));
    }
    if !(threshold > 0.0) {
        return Err(Error::domain(
            "threshold",
            format!("must be positive, got {threshold}"),
        ));
    }
    let limit = threshold / law.sigma;
    let successes = count_stays(law, n, limit, cfg)?;
    Ok(MCEstimate::from_counts(successes, threshold, cfg))
}

fn count_stays(law: &IncrementLaw, n: u64, limit: f64, cfg: &McConfig) -> Result<u64> {
    let seed = cfg.seed;
    Ok(cfg.pool()?.install(|| {
        (0..cfg.samples)
            .into_par_iter()
            .filter(|&i| unit_walk_stays(law, n, limit, &mut StreamRng::for_sample(seed, i)))
            .count() as u64
    }))
}

/// `phi(n) (eps + a_n(eps))`: the threshold in units of `sigma`.
pub fn unit_threshold(n: u64, eps: f64, drift: DriftSpec) -> f64 {
    phi(n as f64) * (eps + drift.a_n(n))
}

/// Estimate `P(M_n <= sigma phi(n) (eps + a_n(eps)))`.
pub fn estimate_small_dev(
    law: &IncrementLaw,
    n: u64,
    eps: f64,
    drift: DriftSpec,
    cfg: &McConfig,
) -> Result<MCEstimate> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::domain("n", "must be at least 1"));
    }
    let unit = unit_threshold(n, eps, drift);
    if !(unit > 0.0) {
        return Err(Error::domain(
            "eps",
            format!(
                "threshold sigma phi(n) (eps + a_n(eps)) must be positive, got {}",
                law.sigma * unit
            ),
        ));
    }
    let successes = count_stays(law, n, unit, cfg)?;
    Ok(MCEstimate::from_counts(successes, law.sigma * unit, cfg))
}

/// `M_n` for samples `0..samples`, in sample-index order.
pub fn sample_walk_maxima(
    law: &IncrementLaw,
    n: u64,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("n", "must be at least 1"));
    }
    if workers == 0 {
        return Err(Error::domain("workers", "at least one worker required"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::argument("workers", e.to_string()))?;
    Ok(pool.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|i| sample_walk_max(law, n, &mut StreamRng::for_sample(seed, i)).m_n)
            .collect()
    }))
}

/// Estimates of `P(M_n <= t)` for several thresholds from one set of paths.
pub fn estimate_cdf_grid(
    law: &IncrementLaw,
    n: u64,
    thresholds: &[f64],
    cfg: &McConfig,
) -> Result<Vec<MCEstimate>> {
    cfg.validate()?;
    if thresholds.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::domain("threshold", "thresholds must be positive"));
    }
    let maxima = sample_walk_maxima(law, n, cfg.samples, cfg.seed, cfg.workers)?;
    Ok(thresholds
        .iter()
        .map(|&t| {
            let successes = maxima.iter().filter(|&&m| m <= t).count() as u64;
            MCEstimate::from_counts(successes, t, cfg)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilityMethod {
    RademacherDp,
    GaussianGrid,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProbabilitySource {
    /// Exact or numerical oracle; errors for laws without one.
    Oracle {
        grid_points: usize,
    },
    MonteCarlo(McConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub n: u64,
    /// `ln P(M_n <= x sigma phi(n))`.
    pub ln_probability: f64,
    /// `-ln P / log n`.
    pub exponent: f64,
    /// Limiting exponent `1 / x^2`.
    pub target: f64,
    pub method: ProbabilityMethod,
    /// Monte Carlo saw no successes; `exponent` is a lower bound from the
    /// one-sided Wilson upper bound on `P`.
    pub lower_bound_only: bool,
}

/// Empirical small-deviation exponent `-log P(M_n <= x sigma phi(n)) / log n`.
pub fn exponent_check(
    law: &IncrementLaw,
    x: f64,
    n_schedule: &[u64],
    source: ProbabilitySource,
) -> Result<Vec<ExponentRow>> {
    if !(x > 0.0) {
        return Err(Error::domain("x", format!("must be positive, got {x}")));
    }
    if n_schedule.is_empty() || n_schedule.windows(2).any(|w| w[1] <= w[0]) || n_schedule[0] == 0 {
        return Err(Error::argument(
            "n_schedule",
            "must be non-empty, positive and strictly increasing",
        ));
    }
    let target = 1.0 / (x * x);
    n_schedule
        .iter()
        .map(|&n| {
            let unit = x * phi(n as f64);
            let (ln_p, method, lower_bound_only) = match source {
                ProbabilitySource::Oracle { grid_points } => match law.kind {
                    LawKind::Rademacher => (
                        rademacher_oracle_ln(n, unit)?,
                        ProbabilityMethod::RademacherDp,
                        false,
                    ),
                    LawKind::Gaussian => (
                        gaussian_grid_oracle(n, unit, grid_points)?.ln_value,
                        ProbabilityMethod::GaussianGrid,
                        false,
                    ),
                    other => {
                        return Err(Error::argument(
                            "law",
                            format!("no exact oracle for `{other}`; use Monte Carlo"),
                        ))
                    }
                },
                ProbabilitySource::MonteCarlo(cfg) => {
                    let est = estimate_below(law, n, law.sigma * unit, &cfg)?;
                    if est.zero_successes {
                        (est.ci_high.ln(), ProbabilityMethod::MonteCarlo, true)
                    } else {
                        (est.p_hat.ln(), ProbabilityMethod::MonteCarlo, false)
                    }
                }
            };
            Ok(ExponentRow {
                n,
                ln_probability: ln_p,
                exponent: -ln_p / log_e(n as f64),
                target,
                method,
                lower_bound_only,
            })
        })
        .collect()
}
