//! Small-deviation asymptotics for maxima of random walks.
//!
//! The crate evaluates the distribution of the sup-norm of a Wiener process
//! on `[0, 1]`, the weighted series
//! `sum_n n^(r-2) (log n)^a P(M_n <= sigma phi(n) (eps + a_n(eps)))`
//! together with its normalised limit as `eps` approaches the critical value
//! `1/sqrt(r-1)`, the convergence dichotomy for boundary families `psi`, and
//! Monte Carlo / exact-oracle estimates of the walk probabilities themselves.
//!
//! Throughout, `log x` means `ln(max(x, e))` (see [`scale::log_e`]).

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brownian;
pub mod dichotomy;
mod error;
pub mod scale;
pub mod series;
pub mod simulate;
pub mod specfun;
pub mod sum;

pub use error::{Error, Result};
