//! Data-parallel map with a sequential fallback.
//!
//! Results always come back in index order, so callers can resolve "first"
//! deterministically no matter how many workers ran.

/// How checks are scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

pub(crate) fn map_range<T, F>(exec: Execution, start: u64, end: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return (start..end).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (start..end).map(f).collect()
}

/// True when the parallel backend is compiled in.
pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}
