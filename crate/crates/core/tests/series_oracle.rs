//! Weighted Wiener series against an independent reference computation.
//!
//! Reference values: direct double-precision summation of the exact theta
//! terms for n <= 10^7, plus the remainder by 30-digit quadrature of the same
//! summand with Euler-Maclaurin end corrections. They share no code with the
//! crate's incomplete-gamma tail.

use smalldev::series::{weighted_series_wiener, DriftSpec, WeightParams};

// (r, a, tau, lambda, normalized)
const REFERENCE: &[(f64, f64, f64, f64, f64)] = &[
    (2.0, 0.0, 0.0, 0.1, 1.245_690_966_485_765_2),
    (2.0, 0.0, 0.0, 0.05, 1.260_359_966_785_175),
    (2.0, 0.0, 0.0, 0.025, 1.267_036_820_045_114_5),
    (2.0, 0.0, 0.0, 0.0125, 1.270_199_175_195_556_4),
    (2.0, 0.0, 0.0, 0.01, 1.270_817_120_032_134),
    (2.0, 1.0, 0.0, 0.1, 1.276_683_653_772_063_2),
    (2.0, 1.0, 0.0, 0.05, 1.274_171_281_528_123_9),
    (2.0, 1.0, 0.0, 0.025, 1.273_481_713_745_056_7),
    (2.0, 1.0, 0.0, 0.0125, 1.273_301_266_829_613),
    (2.0, 1.0, 0.0, 0.01, 1.273_279_199_217_801_4),
    (2.0, 0.0, 1.0, 0.1, 7.657_358_104_048_931),
    (2.0, 0.0, 1.0, 0.05, 8.017_630_394_396_335),
    (2.0, 0.0, 1.0, 0.025, 8.393_731_896_499_428),
    (2.0, 0.0, 1.0, 0.0125, 8.715_274_088_198_857),
    (2.0, 0.0, 1.0, 0.01, 8.802_375_012_435_302),
];

#[test]
fn normalized_series_matches_reference() {
    for &(r, a, tau, lambda, expected) in REFERENCE {
        let params = WeightParams::new(r, a).unwrap();
        let eps = params.eps_for_lambda(lambda);
        let s = weighted_series_wiener(params, eps, DriftSpec::from_tau(tau), 1e-9).unwrap();
        let rel = (s.normalized / expected - 1.0).abs();
        println!(
            "r={r} a={a} tau={tau} lambda={lambda}: {} vs {expected} (rel {rel:.2e}, N={})",
            s.normalized, s.cutoff_n
        );
        assert!(rel < 1e-10, "rel deviation {rel:e}");
    }
}
