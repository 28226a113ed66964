use std::hint::black_box;
use std::time::Instant;

/// Per-query times, in nanoseconds, over the measured batches.
#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub median_ns: f64,
    pub mean_ns: f64,
    pub p99_ns: f64,
    pub samples: Vec<f64>,
}

impl Timing {
    pub fn from_samples(mut samples: Vec<f64>) -> Timing {
        assert!(!samples.is_empty(), "no timing samples");
        samples.sort_by(f64::total_cmp);
        let n = samples.len();
        let median_ns = if n % 2 == 1 {
            samples[n / 2]
        } else {
            0.5 * (samples[n / 2 - 1] + samples[n / 2])
        };
        let mean_ns = samples.iter().sum::<f64>() / n as f64;
        let p99_ns = samples[((0.99 * n as f64).ceil() as usize).clamp(1, n) - 1];
        Timing {
            median_ns,
            mean_ns,
            p99_ns: p99_ns.max(median_ns),
            samples,
        }
    }
}

/// Runs `batch` `warmup` times untimed, then `iters` times timed. Each
/// sample is the batch time divided by `queries_per_batch`.
pub fn time_batches(
    mut batch: impl FnMut() -> f64,
    warmup: usize,
    iters: usize,
    queries_per_batch: usize,
) -> Timing {
    let mut sink = 0.0;
    for _ in 0..warmup {
        sink += batch();
    }
    let mut samples = Vec::with_capacity(iters);
    for _ in 0..iters {
        let start = Instant::now();
        sink += batch();
        let ns = start.elapsed().as_nanos() as f64;
        samples.push(ns / queries_per_batch.max(1) as f64);
    }
    black_box(sink);
    Timing::from_samples(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistics() {
        let t = Timing::from_samples((1..=100).rev().map(f64::from).collect());
        assert_eq!(t.median_ns, 50.5);
        assert_eq!(t.mean_ns, 50.5);
        assert_eq!(t.p99_ns, 99.0);
        let t = Timing::from_samples(vec![3.0]);
        assert_eq!((t.median_ns, t.p99_ns), (3.0, 3.0));
    }

    #[test]
    fn batches_are_counted() {
        let mut calls = 0;
        let t = time_batches(
            || {
                calls += 1;
                1.0
            },
            3,
            7,
            10,
        );
        assert_eq!(calls, 10);
        assert_eq!(t.samples.len(), 7);
        assert!(t.median_ns <= t.p99_ns);
    }
}
