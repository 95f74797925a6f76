use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tail index used for `symmetric_pareto` unless one is given.
pub const DEFAULT_PARETO_ALPHA: f64 = 2.5;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LawKind {
    /// `+-1` with equal probability.
    Rademacher,
    Gaussian,
    /// Uniform on `[-sqrt 3, sqrt 3]`.
    UniformCentered,
    /// `Exp(1) - 1`.
    ExponentialCentered,
    /// `sign * Y`, `P(Y > y) = y^-alpha` for `y >= 1`, rescaled to unit variance.
    SymmetricPareto {
        alpha: f64,
    },
}

impl LawKind {
    pub fn name(&self) -> &'static str {
        match self {
            LawKind::Rademacher => "rademacher",
            LawKind::Gaussian => "gaussian",
            LawKind::UniformCentered => "uniform_centered",
            LawKind::ExponentialCentered => "exponential_centered",
            LawKind::SymmetricPareto { .. } => "symmetric_pareto",
        }
    }
}

impl fmt::Display for LawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rademacher" => LawKind::Rademacher,
            "gaussian" => LawKind::Gaussian,
            "uniform_centered" => LawKind::UniformCentered,
            "exponential_centered" => LawKind::ExponentialCentered,
            "symmetric_pareto" => LawKind::SymmetricPareto {
                alpha: DEFAULT_PARETO_ALPHA,
            },
            other => {
                return Err(Error::argument("law", format!("unknown law `{other}`")));
            }
        })
    }
}

/// Increment distribution with mean zero and variance `sigma^2`, standardised
/// in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncrementLaw {
    pub kind: LawKind,
    pub sigma: f64,
    /// Order `eps` with `E|X|^(2+eps) < inf`.
    pub moment_eps: f64,
}

impl IncrementLaw {
    pub fn new(kind: LawKind, sigma: f64, moment_eps: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain(
                "sigma",
                format!("must be positive, got {sigma}"),
            ));
        }
        if !(moment_eps > 0.0) {
            return Err(Error::domain(
                "moment_eps",
                format!("must be positive, got {moment_eps}"),
            ));
        }
        if let LawKind::SymmetricPareto { alpha } = kind {
            if !(alpha > 2.0) {
                return Err(Error::domain(
                    "alpha",
                    format!("finite variance needs alpha > 2, got {alpha}"),
                ));
            }
            if !(moment_eps < alpha - 2.0) {
                return Err(Error::domain(
                    "moment_eps",
                    format!(
                        "symmetric_pareto with alpha = {alpha} needs moment_eps < {}",
                        alpha - 2.0
                    ),
                ));
            }
        }
        Ok(IncrementLaw {
            kind,
            sigma,
            moment_eps,
        })
    }

    /// Law with the largest admissible default moment order (half the gap for
    /// Pareto tails, 1/2 otherwise).
    pub fn with_sigma(kind: LawKind, sigma: f64) -> Result<Self> {
        let moment_eps = match kind {
            LawKind::SymmetricPareto { alpha } if alpha > 2.0 => (alpha - 2.0) / 2.0,
            _ => 0.5,
        };
        Self::new(kind, sigma, moment_eps)
    }

    pub fn standard(kind: LawKind) -> Result<Self> {
        Self::with_sigma(kind, 1.0)
    }

    /// One increment with unit variance.
    #[inline]
    pub fn sample_unit<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            LawKind::Rademacher => {
                if rng.next_u64() >> 63 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
            LawKind::Gaussian => rng.sample(StandardNormal),
            LawKind::UniformCentered => (2.0 * rng.random::<f64>() - 1.0) * SQRT_3,
            LawKind::ExponentialCentered => -(1.0 - rng.random::<f64>()).ln() - 1.0,
            LawKind::SymmetricPareto { alpha } => {
                let bits = rng.next_u64();
                // u in (0, 1]
                let u = ((bits >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64);
                let y = u.powf(-1.0 / alpha) * ((alpha - 2.0) / alpha).sqrt();
                if bits & 1 == 1 {
                    y
                } else {
                    -y
                }
            }
        }
    }

    /// One increment of the law.
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sigma * self.sample_unit(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::rng::StreamRng;

    fn moments(law: IncrementLaw, draws: u64) -> (f64, f64) {
        let mut rng = StreamRng::for_sample(99, 0);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..draws {
            let x = law.sample(&mut rng);
            s1 += x;
            s2 += x * x;
        }
        let m = s1 / draws as f64;
        (m, s2 / draws as f64 - m * m)
    }

    #[test]
    fn standardised_moments() {
        for kind in [
            LawKind::Rademacher,
            LawKind::Gaussian,
            LawKind::UniformCentered,
            LawKind::ExponentialCentered,
        ] {
            let law = IncrementLaw::with_sigma(kind, 2.0).unwrap();
            let (m, v) = moments(law, 400_000);
            assert!(m.abs() < 0.02, "{kind}: mean {m}");
            assert!((v / 4.0 - 1.0).abs() < 0.02, "{kind}: var {v}");
        }
    }

    #[test]
    fn pareto_is_symmetric_with_heavy_tail() {
        let law = IncrementLaw::standard(LawKind::SymmetricPareto { alpha: 2.5 }).unwrap();
        assert_eq!(law.moment_eps, 0.25);
        let mut rng = StreamRng::for_sample(5, 5);
        let draws = 200_000;
        let mut pos = 0;
        let mut big = 0;
        for _ in 0..draws {
            let x = law.sample(&mut rng);
            if x > 0.0 {
                pos += 1;
            }
            // P(|X| > 10 / scale) = (10)^-2.5 in Pareto units.
            if x.abs() * (5.0f64).sqrt() > 10.0 {
                big += 1;
            }
        }
        assert!((pos as f64 / draws as f64 - 0.5).abs() < 0.01);
        let expected = 10f64.powf(-2.5) * draws as f64;
        assert!((big as f64 - expected).abs() < 5.0 * expected.sqrt());
    }

    #[test]
    fn validation() {
        assert!(IncrementLaw::new(LawKind::Gaussian, 0.0, 0.5).is_err());
        assert!(IncrementLaw::new(LawKind::Gaussian, 1.0, 0.0).is_err());
        assert!(IncrementLaw::new(LawKind::SymmetricPareto { alpha: 2.0 }, 1.0, 0.1).is_err());
        assert!(IncrementLaw::new(LawKind::SymmetricPareto { alpha: 2.5 }, 1.0, 0.5).is_err());
        assert!(IncrementLaw::new(LawKind::SymmetricPareto { alpha: 2.5 }, 1.0, 0.4).is_ok());
        assert_eq!("gaussian".parse::<LawKind>().unwrap(), LawKind::Gaussian);
        assert!("cauchy".parse::<LawKind>().is_err());
    }
}
