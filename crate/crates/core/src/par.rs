//! Data-parallel helpers with a sequential fallback.
//!
//! Work is split by an outer index and results are concatenated in index
//! order, so output is identical in both modes.

/// How to run the outer loop of a triple enumeration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled; sequential otherwise.
    #[default]
    Parallel,
}

pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// `(0..n).flat_map(f)` in index order.
pub(crate) fn flat_map_indexed<T, F>(n: usize, mode: ExecMode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> Vec<T> + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            let parts: Vec<Vec<T>> = (0..n).into_par_iter().map(f).collect();
            parts.into_iter().flatten().collect()
        }
        _ => (0..n).flat_map(f).collect(),
    }
}

/// `(0..n).map(f).sum()`.
pub(crate) fn sum_indexed<F>(n: usize, mode: ExecMode, f: F) -> usize
where
    F: Fn(usize) -> usize + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).sum()
        }
        _ => (0..n).map(f).sum(),
    }
}
