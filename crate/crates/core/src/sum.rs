//! Deterministic parallel summation over index ranges.
//!
//! The index range is cut into fixed-size chunks whose boundaries do not
//! depend on the number of worker threads. Each chunk is summed from low to
//! high index, and chunk sums are merged by a pairwise tree in index order,
//! so the result is bit-identical for any thread pool.

use rayon::prelude::*;

/// Number of consecutive indices summed sequentially inside one chunk.
pub const CHUNK: u64 = 1 << 14;

/// Sum `term(n)` for `n` in `lo..=hi`.
pub fn ordered_sum<F>(lo: u64, hi: u64, term: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    if hi < lo {
        return 0.0;
    }
    let chunks = chunk_sums(lo, hi, &term);
    pairwise(&chunks)
}

/// Per-chunk sums for `lo..=hi`, in index order.
pub fn chunk_sums<F>(lo: u64, hi: u64, term: &F) -> Vec<f64>
where
    F: Fn(u64) -> f64 + Sync,
{
    if hi < lo {
        return Vec::new();
    }
    let count = (hi - lo) / CHUNK + 1;
    (0..count)
        .into_par_iter()
        .map(|c| {
            let start = lo + c * CHUNK;
            let end = (start + CHUNK - 1).min(hi);
            (start..=end).fold(0.0, |acc, n| acc + term(n))
        })
        .collect()
}

/// Pairwise (tree) reduction in slice order.
pub fn pairwise(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len => {
            let mid = len / 2;
            pairwise(&values[..mid]) + pairwise(&values[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_closed_form() {
        let s = ordered_sum(1, 100_000, |n| n as f64);
        assert_eq!(s, 100_000.0 * 100_001.0 / 2.0);
        assert_eq!(ordered_sum(5, 4, |_| 1.0), 0.0);
    }

    #[test]
    fn independent_of_thread_count() {
        let f = |n: u64| 1.0 / (n as f64).powf(1.1);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| ordered_sum(1, 300_000, f));
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| ordered_sum(1, 300_000, f));
        assert_eq!(one.to_bits(), four.to_bits());
    }
}
