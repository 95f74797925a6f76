//! Exact and numerical oracles for `P(max_{k<=n} |S_k| <= x)`.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const RESCALE_BELOW: f64 = 1e-200;

/// `ln P(max_{k<=n} |S_k| <= x)` for the simple `+-1` walk.
///
/// Transfer-matrix propagation over the states `-B..=B`, `B = floor(x)`, with
/// absorbing exterior. Returns `-inf` when the walk cannot stay inside.
pub fn rademacher_oracle_ln(n: u64, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n", "must be at least 1"));
    }
    if !(x >= 0.0) {
        return Err(Error::domain("x", format!("must be non-negative, got {x}")));
    }
    if x >= n as f64 {
        return Ok(0.0);
    }
    let b = x.floor() as usize;
    if b == 0 {
        // The first step already leaves [-x, x].
        return Ok(f64::NEG_INFINITY);
    }
    let width = 2 * b + 1;
    let mut p = vec![0.0f64; width];
    let mut q = vec![0.0f64; width];
    p[b] = 1.0;
    let mut log_scale = 0.0;
    for _ in 0..n {
        q[0] = 0.5 * p[1];
        q[width - 1] = 0.5 * p[width - 2];
        for i in 1..width - 1 {
            q[i] = 0.5 * (p[i - 1] + p[i + 1]);
        }
        std::mem::swap(&mut p, &mut q);
        let mass: f64 = p.iter().sum();
        if mass == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if mass < RESCALE_BELOW {
            p.iter_mut().for_each(|v| *v /= mass);
            log_scale += mass.ln();
        }
    }
    Ok(log_scale + p.iter().sum::<f64>().ln())
}

/// `P(max_{k<=n} |S_k| <= x)` for the simple `+-1` walk.
pub fn rademacher_oracle(n: u64, x: f64) -> Result<f64> {
    rademacher_oracle_ln(n, x).map(f64::exp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOracleResult {
    pub value: f64,
    /// `ln value`, finite even when `value` underflows.
    pub ln_value: f64,
    /// Gap to a half-resolution run; bounds the discretisation error of
    /// `value` when the grid resolves the density.
    pub error_estimate: f64,
    pub grid_points: usize,
}

/// Upper limit on `n` for the grid oracle.
pub const GRID_MAX_N: u64 = 10_000;

/// `P(max_{k<=n} |S_k| <= x)` for standard normal increments.
///
/// The sub-density of `S_k` on the event of staying inside `[-x, x]` is
/// propagated on a uniform trapezoidal grid by FFT convolution with the normal
/// density. A second run on half the grid gives the error estimate.
pub fn gaussian_grid_oracle(n: u64, x: f64, grid_points: usize) -> Result<GridOracleResult> {
    if n == 0 || n > GRID_MAX_N {
        return Err(Error::domain(
            "n",
            format!("must lie in 1..={GRID_MAX_N}, got {n}"),
        ));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("x", format!("must be positive, got {x}")));
    }
    if grid_points < 256 {
        return Err(Error::domain(
            "grid",
            format!("at least 256 grid points required, got {grid_points}"),
        ));
    }
    let ln_fine = propagate(n, x, grid_points);
    let ln_coarse = propagate(n, x, grid_points / 2);
    let fine = ln_fine.exp();
    let coarse = ln_coarse.exp();
    // Trapezoidal error is O(h^2), so the fine error is about a third of the
    // gap; the whole gap is reported to stay on the safe side of that guess.
    let error_estimate = (fine - coarse).abs();
    Ok(GridOracleResult {
        value: fine.clamp(0.0, 1.0),
        ln_value: ln_fine.min(0.0),
        error_estimate,
        grid_points,
    })
}

struct Convolver {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kernel: Vec<Complex<f64>>,
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
    points: usize,
}

impl Convolver {
    fn new(points: usize, h: f64) -> Self {
        let len = (3 * points).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let density = |d: f64| (-0.5 * d * d).exp() / (2.0 * std::f64::consts::PI).sqrt();
        // Kernel index j holds offset j - (points - 1).
        let mut kernel = vec![Complex::new(0.0, 0.0); len];
        for (j, k) in kernel.iter_mut().take(2 * points - 1).enumerate() {
            let offset = j as f64 - (points - 1) as f64;
            *k = Complex::new(density(offset * h) / len as f64, 0.0);
        }
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        let mut scratch = vec![Complex::new(0.0, 0.0); scratch_len];
        forward.process_with_scratch(&mut kernel, &mut scratch);
        Convolver {
            forward,
            inverse,
            kernel,
            buf: vec![Complex::new(0.0, 0.0); len],
            scratch,
            points,
        }
    }

    /// `out[i] = sum_j input[j] K(y_i - y_j)` for grid points `i`.
    fn apply(&mut self, input: &[f64], out: &mut [f64]) {
        self.buf
            .iter_mut()
            .for_each(|c| *c = Complex::new(0.0, 0.0));
        for (b, &v) in self.buf.iter_mut().zip(input) {
            *b = Complex::new(v, 0.0);
        }
        self.forward
            .process_with_scratch(&mut self.buf, &mut self.scratch);
        for (b, k) in self.buf.iter_mut().zip(&self.kernel) {
            *b *= k;
        }
        self.inverse
            .process_with_scratch(&mut self.buf, &mut self.scratch);
        let shift = self.points - 1;
        for (i, o) in out.iter_mut().enumerate() {
            // Sub-densities are non-negative; clip FFT round-off.
            *o = self.buf[i + shift].re.max(0.0);
        }
    }
}

/// `ln P` on a grid of `points` nodes.
fn propagate(n: u64, x: f64, points: usize) -> f64 {
    let h = 2.0 * x / (points - 1) as f64;
    let weights: Vec<f64> = (0..points)
        .map(|j| {
            if j == 0 || j == points - 1 {
                0.5 * h
            } else {
                h
            }
        })
        .collect();
    let grid = |j: usize| -x + j as f64 * h;
    let density = |y: f64| (-0.5 * y * y).exp() / (2.0 * std::f64::consts::PI).sqrt();

    let mut p: Vec<f64> = (0..points).map(|j| density(grid(j))).collect();
    let mut log_scale = 0.0;
    let mut conv = Convolver::new(points, h);
    let mut weighted = vec![0.0; points];
    let mut next = vec![0.0; points];
    for _ in 1..n {
        for ((w, &pj), &wj) in weighted.iter_mut().zip(&p).zip(&weights) {
            *w = pj * wj;
        }
        conv.apply(&weighted, &mut next);
        std::mem::swap(&mut p, &mut next);
        let peak = p.iter().cloned().fold(0.0, f64::max);
        if peak == 0.0 {
            return f64::NEG_INFINITY;
        }
        if peak < 1e-100 {
            p.iter_mut().for_each(|v| *v /= peak);
            log_scale += peak.ln();
        }
    }
    let mass: f64 = p.iter().zip(&weights).map(|(a, b)| a * b).sum();
    log_scale + mass.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Enumerate all 2^n paths.
    fn brute_force(n: u32, x: f64) -> f64 {
        let mut inside = 0u64;
        for path in 0..(1u64 << n) {
            let mut s = 0i64;
            let mut ok = true;
            for k in 0..n {
                s += if path >> k & 1 == 1 { 1 } else { -1 };
                if (s.abs() as f64) > x {
                    ok = false;
                    break;
                }
            }
            if ok {
                inside += 1;
            }
        }
        inside as f64 / (1u64 << n) as f64
    }

    #[test]
    fn rademacher_small_cases() {
        assert_eq!(rademacher_oracle(2, 1.0).unwrap(), 0.5);
        assert_eq!(rademacher_oracle(1, 0.5).unwrap(), 0.0);
        assert_eq!(rademacher_oracle(20, 20.0).unwrap(), 1.0);
        assert_eq!(rademacher_oracle(1, 1.0).unwrap(), 1.0);
        assert!(rademacher_oracle(3, -1.0).is_err());
        assert!(rademacher_oracle(0, 1.0).is_err());
    }

    #[test]
    fn rademacher_matches_enumeration() {
        for n in 1..=14 {
            for &x in &[1.0, 1.5, 2.0, 3.7, 5.0] {
                let exact = brute_force(n, x);
                let dp = rademacher_oracle(n as u64, x).unwrap();
                assert!((dp - exact).abs() < 1e-14, "n={n} x={x}: {dp} vs {exact}");
            }
        }
    }

    #[test]
    fn rademacher_log_form_survives_underflow() {
        // ln P is about -n pi^2 / (8 B^2) for a narrow band.
        let lp = rademacher_oracle_ln(200_000, 2.0).unwrap();
        assert!(lp.is_finite() && lp < -700.0);
    }

    #[test]
    fn gaussian_single_step() {
        // mpmath: erf(sqrt 2) = Phi(2) - Phi(-2)
        let truth = 0.954_499_736_103_641_6;
        let r = gaussian_grid_oracle(1, 2.0, 1024).unwrap();
        assert!((r.value - truth).abs() <= r.error_estimate);
        assert!(r.error_estimate < 1e-5);
    }

    #[test]
    fn gaussian_refinement_consistent() {
        let r = gaussian_grid_oracle(50, 3.0, 512).unwrap();
        let finer = gaussian_grid_oracle(50, 3.0, 1024).unwrap();
        assert!((finer.value - r.value).abs() < r.error_estimate);
    }

    #[test]
    fn gaussian_two_steps_against_quadrature() {
        // P(|X1| <= x, |X1 + X2| <= x) = int_{-x}^{x} phi(u) (Phi(x-u) - Phi(-x-u)) du
        use statrs::distribution::{ContinuousCDF, Normal};
        let normal = Normal::new(0.0, 1.0).unwrap();
        let x = 1.3;
        let m = 20_000;
        let h = 2.0 * x / m as f64;
        let mut acc = 0.0;
        for i in 0..m {
            let u = -x + (i as f64 + 0.5) * h;
            let dens = (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
            acc += dens * (normal.cdf(x - u) - normal.cdf(-x - u)) * h;
        }
        let r = gaussian_grid_oracle(2, x, 1024).unwrap();
        assert_relative_eq!(r.value, acc, max_relative = 1e-6);
    }

    #[test]
    fn gaussian_validation() {
        assert!(gaussian_grid_oracle(0, 1.0, 512).is_err());
        assert!(gaussian_grid_oracle(GRID_MAX_N + 1, 1.0, 512).is_err());
        assert!(gaussian_grid_oracle(5, 0.0, 512).is_err());
        assert!(gaussian_grid_oracle(5, 1.0, 128).is_err());
    }
}
