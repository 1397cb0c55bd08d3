use crate::error::{Error, Result};

/// Runs `f` inside a rayon pool of `threads` workers (0 = rayon default).
pub(crate) fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::ResourceLimit(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
