//! Convergence dichotomy for boundaries `psi(n) = c log n + b log log n + d`.
//!
//! The probability series `sum n^(r-2) (log n)^a P(M_n <= sigma sqrt(pi^2 n / (8 psi(n))))`
//! converges exactly when `sum n^(r-2) (log n)^a exp(-psi(n))` does. For the
//! three-parameter family the latter is decided by the integral test; for an
//! arbitrary tabulated `psi` only partial-sum diagnostics are offered.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::brownian::sup_cdf_relative;
use crate::scale::{log_e, log_log_e};
use crate::series::WeightParams;
use crate::sum::ordered_sum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiSpec {
    /// Coefficient of `log n`.
    pub c: f64,
    /// Coefficient of `log log n`.
    pub b: f64,
    /// Constant offset.
    pub d: f64,
}

impl PsiSpec {
    pub fn new(c: f64, b: f64, d: f64) -> Result<Self> {
        let psi = PsiSpec { c, b, d };
        psi.validate()?;
        Ok(psi)
    }

    /// Eventually non-decreasing and positive.
    pub fn validate(&self) -> Result<()> {
        if ![self.c, self.b, self.d].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("psi", "coefficients must be finite"));
        }
        if self.c > 0.0 || (self.c == 0.0 && self.b >= 0.0 && self.d > 0.0) {
            Ok(())
        } else {
            Err(Error::domain(
                "psi",
                format!(
                    "psi = {} log n + {} log log n + {} is not eventually positive and non-decreasing",
                    self.c, self.b, self.d
                ),
            ))
        }
    }

    pub fn eval(&self, n: u64) -> f64 {
        let nf = n as f64;
        self.c * log_e(nf) + self.b * log_log_e(nf) + self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Converges,
    Diverges,
}

/// Decide convergence of `sum n^(r-2) (log n)^a exp(-psi(n))`.
///
/// The summand is `e^-d n^(r-2-c) (log n)^(a-b)` up to the bounded factor
/// from `log log` at small `n`, so the series converges iff `c > r - 1`, or
/// `c = r - 1` and `b - a > 1`. The borderline `b - a = 1` diverges.
pub fn classify_psi(psi: PsiSpec, params: WeightParams) -> Result<Verdict> {
    psi.validate()?;
    let gap = psi.c - (params.r() - 1.0);
    Ok(if gap > 0.0 || (gap == 0.0 && psi.b - params.a() > 1.0) {
        Verdict::Converges
    } else {
        Verdict::Diverges
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummandMode {
    /// `n^(r-2) (log n)^a exp(-psi(n))`.
    Exponential,
    /// `n^(r-2) (log n)^a P(sup|W| <= sqrt(pi^2 / (8 psi(n))))`.
    WienerProb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub cutoff: u64,
    pub partial_sum: f64,
    /// Partial sum minus the previous row's.
    pub increment: f64,
}

/// `n^(r-2) (log n)^a` times the mode's factor at a boundary value `psi`.
///
/// For `psi <= 0` the Wiener threshold is unbounded and the probability is one.
pub fn summand(params: WeightParams, n: u64, psi: f64, mode: SummandMode) -> f64 {
    let w = params.weight(n);
    match mode {
        SummandMode::Exponential => w * (-psi).exp(),
        SummandMode::WienerProb => {
            if psi <= 0.0 {
                w
            } else {
                w * sup_cdf_relative((PI * PI / (8.0 * psi)).sqrt())
            }
        }
    }
}

/// Cutoffs `10, 100, ...` below `n_max`, followed by `n_max` itself.
pub fn decade_cutoffs(n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = 10u64;
    while c < n_max {
        out.push(c);
        c = match c.checked_mul(10) {
            Some(v) => v,
            None => break,
        };
    }
    out.push(n_max);
    out
}

fn table<F: Fn(u64) -> f64 + Sync>(cutoffs: &[u64], term: F) -> Vec<DiagnosticRow> {
    let mut rows = Vec::with_capacity(cutoffs.len());
    let mut partial = 0.0;
    let mut prev = 0;
    for &cutoff in cutoffs {
        let increment = ordered_sum(prev + 1, cutoff, &term);
        partial += increment;
        rows.push(DiagnosticRow {
            cutoff,
            partial_sum: partial,
            increment,
        });
        prev = cutoff;
    }
    rows
}

/// Partial sums of the mode's series at cutoffs `10, 100, ..., n_max`.
pub fn partial_sum_diagnostic(
    psi: PsiSpec,
    params: WeightParams,
    n_max: u64,
    mode: SummandMode,
) -> Result<Vec<DiagnosticRow>> {
    psi.validate()?;
    if n_max < 10 {
        return Err(Error::argument(
            "n",
            format!("N >= 10 required, got {n_max}"),
        ));
    }
    Ok(table(&decade_cutoffs(n_max), |n| {
        summand(params, n, psi.eval(n), mode)
    }))
}

/// Diagnostics for a boundary given as values `psi(1), psi(2), ...`.
///
/// Initial terms are summed as given; no verdict is attempted.
pub fn partial_sum_diagnostic_tabulated(
    psi_values: &[f64],
    params: WeightParams,
    mode: SummandMode,
) -> Result<Vec<DiagnosticRow>> {
    let n_max = psi_values.len() as u64;
    if n_max < 10 {
        return Err(Error::argument(
            "psi",
            format!("at least 10 tabulated values required, got {n_max}"),
        ));
    }
    if psi_values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("psi", "tabulated values must be finite"));
    }
    Ok(table(&decade_cutoffs(n_max), |n| {
        summand(params, n, psi_values[(n - 1) as usize], mode)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartialSumTrend {
    Plateau,
    Growth,
}

/// Exponent `p` in `I_k ~ k^-p`, where `I_k` is the increment over the decade
/// `(10^(k-1), 10^k]`, from the last two complete decades of a table.
///
/// Condensation: the series converges iff `sum_k I_k` does, i.e. roughly iff
/// `p > 1`. Needs cutoffs through at least `10^3`.
pub fn increment_decay_exponent(rows: &[DiagnosticRow]) -> Option<f64> {
    let decades: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|row| {
            let k = (row.cutoff as f64).log10().round();
            (k >= 2.0 && 10f64.powf(k) as u64 == row.cutoff).then_some((k, row.increment))
        })
        .collect();
    let [.., (k0, i0), (k1, i1)] = decades[..] else {
        return None;
    };
    if !(i0 > 0.0 && i1 > 0.0) {
        return None;
    }
    Some((i0 / i1).ln() / (k1 / k0).ln())
}

/// Decay exponent above which a table is read as settling.
pub const PLATEAU_EXPONENT: f64 = 1.5;

/// Finite-range reading of a diagnostic table; a heuristic, not a verdict.
pub fn partial_sum_trend(rows: &[DiagnosticRow]) -> Option<PartialSumTrend> {
    increment_decay_exponent(rows).map(|p| {
        if p > PLATEAU_EXPONENT {
            PartialSumTrend::Plateau
        } else {
            PartialSumTrend::Growth
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(r: f64, a: f64) -> WeightParams {
        WeightParams::new(r, a).unwrap()
    }

    #[test]
    fn classifier_examples() {
        let params = p(2.0, 0.0);
        let cases = [
            (PsiSpec::new(1.5, 0.0, 0.0).unwrap(), Verdict::Converges),
            (PsiSpec::new(1.0, 2.0, 0.0).unwrap(), Verdict::Converges),
            (PsiSpec::new(1.0, 1.0, 0.0).unwrap(), Verdict::Diverges),
            (PsiSpec::new(0.5, 10.0, 3.0).unwrap(), Verdict::Diverges),
        ];
        for (psi, expected) in cases {
            assert_eq!(classify_psi(psi, params).unwrap(), expected, "{psi:?}");
        }
    }

    #[test]
    fn invalid_psi_rejected() {
        assert!(PsiSpec::new(-1.0, 0.0, 5.0).is_err());
        assert!(PsiSpec::new(0.0, -1.0, 5.0).is_err());
        assert!(PsiSpec::new(0.0, 0.0, 0.0).is_err());
        assert!(PsiSpec::new(0.0, 0.0, 2.0).is_ok());
        let bad = PsiSpec {
            c: -2.0,
            b: 0.0,
            d: 0.0,
        };
        assert!(matches!(
            classify_psi(bad, p(2.0, 0.0)),
            Err(Error::Domain { param: "psi", .. })
        ));
    }

    #[test]
    fn cutoffs_are_decades_then_n() {
        assert_eq!(decade_cutoffs(10), vec![10]);
        assert_eq!(decade_cutoffs(1000), vec![10, 100, 1000]);
        assert_eq!(decade_cutoffs(2500), vec![10, 100, 1000, 2500]);
    }

    #[test]
    fn wiener_summand_is_sandwiched() {
        let params = p(2.0, 0.5);
        let psi = PsiSpec::new(1.0, 1.0, 0.0).unwrap();
        for n in [10u64, 100, 10_000, 1_000_000] {
            let e = summand(params, n, psi.eval(n), SummandMode::Exponential);
            let w = summand(params, n, psi.eval(n), SummandMode::WienerProb);
            let ratio = w / e;
            assert!((2.0 / PI..=4.0 / PI + 1e-12).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn tabulated_matches_family() {
        let params = p(2.0, 0.0);
        let psi = PsiSpec::new(1.5, 0.0, 0.2).unwrap();
        let values: Vec<f64> = (1..=1000).map(|n| psi.eval(n)).collect();
        let a = partial_sum_diagnostic(psi, params, 1000, SummandMode::Exponential).unwrap();
        let b =
            partial_sum_diagnostic_tabulated(&values, params, SummandMode::Exponential).unwrap();
        assert_eq!(a, b);
        assert!(
            partial_sum_diagnostic_tabulated(&values[..5], params, SummandMode::Exponential)
                .is_err()
        );
        assert!(partial_sum_diagnostic(psi, params, 9, SummandMode::Exponential).is_err());
    }

    #[test]
    fn trend_reads_decade_increments() {
        let params = p(2.0, 0.0);
        let run = |c, b| {
            let rows = partial_sum_diagnostic(
                PsiSpec::new(c, b, 0.0).unwrap(),
                params,
                100_000,
                SummandMode::Exponential,
            )
            .unwrap();
            (
                increment_decay_exponent(&rows).unwrap(),
                partial_sum_trend(&rows).unwrap(),
            )
        };
        let (p_geo, t) = run(1.5, 0.0);
        assert!(p_geo > 5.0);
        assert_eq!(t, PartialSumTrend::Plateau);
        let (p_two, t) = run(1.0, 2.0);
        assert!((p_two - 2.0).abs() < 0.5, "{p_two}");
        assert_eq!(t, PartialSumTrend::Plateau);
        let (p_one, t) = run(1.0, 1.0);
        assert!((p_one - 1.0).abs() < 0.3, "{p_one}");
        assert_eq!(t, PartialSumTrend::Growth);
        let (p_zero, _) = run(1.0, 0.0);
        assert!(p_zero.abs() < 0.1, "{p_zero}");
        assert!(increment_decay_exponent(&[]).is_none());
    }
}
