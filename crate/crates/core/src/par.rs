//! Data-parallel helpers with a sequential fallback.
//!
//! Every hot loop in the crate goes through [`Parallelism`], so callers pick
//! the execution mode at run time and the `parallel` cargo feature decides
//! whether the parallel mode is actually backed by rayon. Results are always
//! returned in input order, so output never depends on the thread count.

/// Execution mode for batch work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    /// True when this mode will actually fan out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Maps `f` over `0..n`.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Flat-maps each item into zero or more outputs, concatenated in input order.
    pub fn flat_map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T, &mut Vec<R>) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            let chunk = (items.len() / (4 * rayon::current_num_threads()).max(1)).max(256);
            let parts: Vec<Vec<R>> = items
                .par_chunks(chunk)
                .map(|c| {
                    let mut out = Vec::new();
                    for it in c {
                        f(it, &mut out);
                    }
                    out
                })
                .collect();
            return parts.into_iter().flatten().collect();
        }
        let mut out = Vec::new();
        for it in items {
            f(it, &mut out);
        }
        out
    }

    pub fn sort_unstable<T: Ord + Send>(self, v: &mut [T]) {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            v.par_sort_unstable();
            return;
        }
        v.sort_unstable();
    }

    /// Smallest index in `0..n` satisfying `pred`, scanning in blocks.
    pub fn find_first<F>(self, n: usize, pred: F) -> Option<usize>
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().find_first(|&i| pred(i));
        }
        (0..n).find(|&i| pred(i))
    }

    /// True if `pred` holds for every item.
    pub fn all<T, F>(self, items: &[T], pred: F) -> bool
    where
        T: Sync,
        F: Fn(&T) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().all(pred);
        }
        items.iter().all(pred)
    }
}

/// Configures the global worker pool. A no-op without the `parallel` feature.
pub fn configure_threads(threads: usize) -> Result<(), String> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(())
    }
}
