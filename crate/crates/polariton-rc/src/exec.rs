//! Batch execution over independent work items (one simulation per digit,
//! one run per sweep point).
//!
//! With the `parallel` feature (default) batches run on a rayon pool;
//! without it the same API runs sequentially. Results are always collected
//! in input order, so reports are byte-identical regardless of feature
//! selection or thread count.

use crate::error::{Error, Result};

/// Map sequentially, preserving order. Always available; the benchmark
/// suite uses it as the comparison baseline.
pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Map over independent items, in parallel when the `parallel` feature is
/// enabled. Output order matches input order.
#[cfg(feature = "parallel")]
pub fn batch_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn batch_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    seq_map(items, f)
}

/// Size the global worker pool. `None` keeps the library default (one
/// worker per core). Calling more than once is an error only if the sizes
/// disagree; without the `parallel` feature the request is checked and
/// otherwise ignored.
pub fn configure_threads(threads: Option<usize>) -> Result<()> {
    let Some(t) = threads else {
        return Ok(());
    };
    if t == 0 {
        return Err(Error::Parameter("thread count must be >= 1".into()));
    }
    #[cfg(feature = "parallel")]
    {
        // Do not query the pool first: merely asking rayon for its size
        // instantiates the default global pool, after which resizing fails.
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            if rayon::current_num_threads() != t {
                return Err(Error::Parameter(format!(
                    "cannot size thread pool to {t}: {e}"
                )));
            }
        }
    }
    Ok(())
}
