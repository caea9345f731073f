//! Execution helpers: data-parallel maps over index ranges with deterministic
//! reductions.
//!
//! With the `parallel` feature (default) these run on the rayon pool; without
//! it they are plain sequential loops. Every reduction used in this crate is
//! associative and commutative over a total order, so results are identical
//! for any worker count, including one.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..n).map(f)` collected in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Map each index to a candidate and reduce with `merge`. `merge` must be
/// associative and commutative for the result to be worker-count invariant.
#[cfg(feature = "parallel")]
pub(crate) fn map_reduce<T, F, R>(n: usize, f: F, merge: R) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).reduce_with(merge)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_reduce<T, F, R>(n: usize, f: F, merge: R) -> Option<T>
where
    F: Fn(usize) -> T,
    R: Fn(T, T) -> T,
{
    (0..n).map(f).reduce(merge)
}

/// Number of worker threads the helpers above will use.
pub fn effective_parallelism() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Pin the global worker pool to `threads` (0 keeps the library default).
/// Has no effect after the pool is already initialized, and none at all in a
/// sequential build.
pub fn set_thread_count(threads: usize) {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}
