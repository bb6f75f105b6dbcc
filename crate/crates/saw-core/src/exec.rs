//! Data-parallel map with a sequential fallback.
//!
//! The enumeration and verification drivers fan independent subproblems out
//! with `par_map`. With the `parallel` feature (default) the work runs on the
//! rayon pool; without it, sequentially. Results are returned in input order
//! either way, so downstream reductions are deterministic.

/// Map `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order always matches input order.
#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

/// Map `f` over `items` sequentially (the `parallel` feature is off).
#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}

/// Cap the rayon pool at `jobs` threads. No-op without the `parallel`
/// feature or if a pool is already installed; call once, early.
pub fn limit_jobs(jobs: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
    }
}
