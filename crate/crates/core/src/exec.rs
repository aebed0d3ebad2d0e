//! Execution-mode plumbing for the enumeration loops.
//!
//! Every exhaustive scan in this crate is a map over independent work units
//! followed by a commutative-associative merge, so each one can run either
//! sequentially or on the rayon pool. The `parallel` feature (on by default)
//! enables the rayon path; without it `Exec::Parallel` silently degrades to
//! the sequential loop.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How an enumeration loop should run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Use the global rayon pool. Without the `parallel` feature this is
    /// equivalent to `Sequential`.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Exec::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Exec::Sequential
        }
    }
}

/// Map every work unit and merge the results.
pub(crate) fn map_reduce<W, T, M, R>(items: Vec<W>, exec: Exec, identity: fn() -> T, map: M, reduce: R) -> T
where
    W: Send,
    T: Send,
    M: Fn(W) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    match exec {
        Exec::Sequential => items.into_iter().map(map).fold(identity(), reduce),
        #[cfg(feature = "parallel")]
        Exec::Parallel => items
            .into_par_iter()
            .map(map)
            .reduce(identity, reduce),
        #[cfg(not(feature = "parallel"))]
        Exec::Parallel => items.into_iter().map(map).fold(identity(), reduce),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let items: Vec<u64> = (0..100).collect();
        let seq = map_reduce(items.clone(), Exec::Sequential, || 0u64, |x| x * x, |a, b| a + b);
        let par = map_reduce(items, Exec::Parallel, || 0u64, |x| x * x, |a, b| a + b);
        assert_eq!(seq, par);
        assert_eq!(seq, 328350);
    }
}
