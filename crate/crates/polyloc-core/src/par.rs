//! Data-parallel helpers. With the `parallel` feature (default) work is
//! distributed with rayon; without it, or when forced via
//! [`force_sequential`], the same helpers run sequentially. Output order is
//! identical either way.

use crate::error::Result;
use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Force all helpers onto the sequential path at runtime (used by the
/// benchmark suite to compare backends within one binary).
pub fn force_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
}

pub fn is_sequential() -> bool {
    !cfg!(feature = "parallel") || FORCE_SEQUENTIAL.load(Ordering::SeqCst)
}

/// Configure the global thread pool from the `POLYLOC_THREADS` environment
/// variable. A value of 1 forces the sequential path; invalid values are
/// ignored. Call once at startup; later calls are no-ops.
pub fn init_threads_from_env() {
    if let Ok(text) = std::env::var("POLYLOC_THREADS") {
        if let Ok(nthreads) = text.trim().parse::<usize>() {
            if nthreads == 1 {
                force_sequential(true);
            }
            #[cfg(feature = "parallel")]
            if nthreads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(nthreads).build_global();
            }
        }
    }
}

/// Map a fallible function over a slice, preserving order, parallel when
/// available and not forced off.
pub fn maybe_par_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if !is_sequential() {
            use rayon::prelude::*;
            return items.par_iter().map(|t| f(t)).collect();
        }
    }
    items.iter().map(|t| f(t)).collect()
}

/// Run `count` indexed jobs, preserving index order.
pub fn maybe_par_map_index<U, F>(count: usize, f: F) -> Result<Vec<U>>
where
    U: Send,
    F: Fn(usize) -> Result<U> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if !is_sequential() {
            use rayon::prelude::*;
            return (0..count).into_par_iter().map(|i| f(i)).collect();
        }
    }
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let items: Vec<u64> = (0..257).collect();
        let par = maybe_par_map(&items, |&x| Ok(x * x + 1)).unwrap();
        force_sequential(true);
        let seq = maybe_par_map(&items, |&x| Ok(x * x + 1)).unwrap();
        force_sequential(false);
        assert_eq!(par, seq);
        assert_eq!(par[10], 101);
    }

    #[test]
    fn index_map_preserves_order() {
        let v = maybe_par_map_index(100, |i| Ok(i as i64 - 50)).unwrap();
        assert_eq!(v[0], -50);
        assert_eq!(v[99], 49);
    }
}
