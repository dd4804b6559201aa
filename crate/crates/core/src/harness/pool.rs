use crate::error::{Error, Result};

/// Environment variable holding the default worker-pool size.
pub const WORKERS_ENV: &str = "MEMESIM_WORKERS";

/// Explicit value, else the environment variable, else all cores.
pub fn worker_count(explicit: Option<usize>) -> Result<usize> {
    let n = match explicit {
        Some(n) => n,
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{WORKERS_ENV}={v:?} is not a worker count")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if n == 0 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    Ok(n)
}

/// Runs `f` inside a dedicated pool of `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}
