//! Data-parallel helpers with a sequential fallback.
//!
//! The `parallel` feature (on by default) backs these with rayon. With the
//! feature disabled the same entry points run sequentially, so callers never
//! branch. The explicitly sequential variants stay available either way for
//! benchmarking one against the other.

/// Map `0..n` and collect in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    map_indexed_seq(n, f)
}

/// Sequential reference implementation.
pub fn map_indexed_seq<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Index of the first item (in index order) satisfying `pred`.
#[cfg(feature = "parallel")]
pub fn find_first<F: Fn(usize) -> bool + Sync + Send>(n: usize, pred: F) -> Option<usize> {
    use rayon::prelude::*;
    (0..n).into_par_iter().find_first(|&i| pred(i))
}

#[cfg(not(feature = "parallel"))]
pub fn find_first<F: Fn(usize) -> bool + Sync + Send>(n: usize, pred: F) -> Option<usize> {
    find_first_seq(n, pred)
}

pub fn find_first_seq<F: Fn(usize) -> bool>(n: usize, pred: F) -> Option<usize> {
    (0..n).find(|&i| pred(i))
}
