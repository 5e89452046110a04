//! Order-preserving map over an index range, parallel when the `parallel`
//! feature is enabled. Results are always returned in index order.

#[cfg(feature = "parallel")]
pub fn map_indexed<T: Send>(len: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T: Send>(len: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..len).map(f).collect()
}

/// Fallible variant; the first error in index order is returned.
pub fn try_map_indexed<T: Send, E: Send>(
    len: usize,
    f: impl Fn(usize) -> Result<T, E> + Sync + Send,
) -> Result<Vec<T>, E> {
    map_indexed(len, f).into_iter().collect()
}
