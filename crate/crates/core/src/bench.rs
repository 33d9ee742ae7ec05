//! Timing of the maxima routines on random inputs.

use std::time::{Duration, Instant};

use crate::error::Result;
use crate::io::random_vectors;
use crate::pareto::{maxima_indices, maxima_indices_naive};
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub maxima: usize,
    /// Best of the repetitions.
    pub fast: Duration,
    pub naive: Option<Duration>,
}

/// Best wall time of `reps` runs of `f`, and its last result.
pub fn best_of<T>(reps: usize, mut f: impl FnMut() -> T) -> (Duration, T) {
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let out = f();
        best = best.min(start.elapsed());
        last = Some(out);
    }
    (best, last.expect("at least one run"))
}

pub fn random_points(n: usize, k: usize, seed: u64) -> Result<Vec<Vector>> {
    random_vectors(n, k, seed, false, 1..=1_000_000_000)
}

/// One row per size. The quadratic oracle is timed only up to
/// `naive_limit` points.
pub fn bench_maxima(
    k: usize,
    sizes: &[usize],
    seed: u64,
    reps: usize,
    naive_limit: usize,
) -> Result<Vec<BenchRow>> {
    sizes
        .iter()
        .map(|&n| {
            let points = random_points(n, k, seed ^ n as u64)?;
            let (fast, found) = best_of(reps, || maxima_indices(&points));
            let naive = (n <= naive_limit).then(|| {
                let (t, slow) = best_of(reps, || maxima_indices_naive(&points));
                assert_eq!(slow, found, "maxima routines disagree");
                t
            });
            Ok(BenchRow {
                n,
                k,
                maxima: found.len(),
                fast,
                naive,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bench_runs() {
        let rows = bench_maxima(3, &[50, 100], 1, 1, 100).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.naive.is_some() && r.maxima >= 1));
    }
}
