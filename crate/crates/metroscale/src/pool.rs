//! Bounded worker pool for embarrassingly parallel index ranges.
//!
//! Worker count comes from `METROSCALE_WORKERS` when set, otherwise from the
//! available parallelism. Every job derives its own seed from its index, so
//! results are identical no matter how the range is partitioned.

use std::num::NonZeroUsize;

pub const WORKERS_ENV: &str = "METROSCALE_WORKERS";

/// Effective worker count.
pub fn worker_count() -> usize {
    if let Ok(raw) = std::env::var(WORKERS_ENV) {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism()
        .map(NonZeroUsize::get)
        .unwrap_or(1)
}

/// Run `f(0..n)` across the pool and collect results in index order.
pub fn run_indexed<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let workers = worker_count().min(n.max(1));
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(workers);
    let mut chunks: Vec<Vec<R>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(n);
                scope.spawn(move || (lo..hi).map(f).collect::<Vec<R>>())
            })
            .collect();
        chunks = handles.into_iter().map(|h| h.join().expect("worker panicked")).collect();
    });
    chunks.into_iter().flatten().collect()
}
