//! Replication scheduling.
//!
//! With the `parallel` feature (on by default) replications run on the
//! rayon pool; without it, [`Execution::Parallel`] quietly runs sequentially.
//! Either way results come back in replication order.

/// How replications are scheduled.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run replications concurrently.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Evaluate `f(0), f(1), ..., f(reps - 1)` and return them in index order.
pub fn replicate<T, F>(exec: Execution, reps: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..reps).map(f).collect(),
        Execution::Parallel => replicate_parallel(reps, f),
    }
}

#[cfg(feature = "parallel")]
fn replicate_parallel<T, F>(reps: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..reps).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn replicate_parallel<T, F>(reps: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..reps).map(f).collect()
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum PoolError {
    #[error("worker count must be positive")]
    ZeroThreads,
    #[error("could not configure the worker pool: {0}")]
    Build(String),
}

/// Fix the number of workers used by [`Execution::Parallel`]. Without the
/// `parallel` feature this only validates the count.
pub fn set_worker_threads(threads: usize) -> Result<(), PoolError> {
    if threads == 0 {
        return Err(PoolError::ZeroThreads);
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| PoolError::Build(e.to_string()))?;
    Ok(())
}
