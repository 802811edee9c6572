//! Execution strategy for the data-parallel scans.
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] maps over rayon's
//! pool; without it every strategy runs sequentially.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Order-preserving map.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }
}

/// Runs `f` on a pool of `jobs` threads (sequentially when the feature is
/// off or `jobs` is 1).
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce(Exec) -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if jobs > 1 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                return pool.install(|| f(Exec::Parallel));
            }
        }
        if jobs == 0 {
            return f(Exec::Parallel);
        }
    }
    let _ = jobs;
    f(Exec::Sequential)
}
