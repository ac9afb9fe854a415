use rayon::prelude::*;

use crate::error::{invalid, Result};

/// Evaluate `f(0), ..., f(n-1)` in parallel, returning results in index
/// order. `threads` caps the worker count; `None` uses the global pool.
pub fn par_map<T, F>(n: usize, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let run = || (0..n as u64).into_par_iter().map(&f).collect::<Vec<T>>();
    match threads {
        None => Ok(run()),
        Some(0) => Err(invalid("threads", "must be >= 1")),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| invalid("threads", e.to_string()))?;
            Ok(pool.install(run))
        }
    }
}
