//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (default), work fans out over a rayon pool
//! sized by `workers` (0 = rayon default). Without it, or with `workers = 1`,
//! the map runs sequentially. Output is identical either way because each
//! work unit derives its own seed from its index.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    if workers == 0 {
        return (0..n).into_par_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build worker pool");
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, _workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    (0..n).map(f).collect()
}
