//! Data-parallel loop helpers with a sequential fallback.
//!
//! Every helper assembles its output in index order, and reductions sum
//! fixed-size chunks in a fixed order, so both modes return bit-identical
//! results.

use num_complex::Complex64;

const CHUNK: usize = 1024;

/// How the data-parallel loops are executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled; otherwise sequential.
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

impl ExecMode {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecMode::Parallel
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<R, F>(mode: ExecMode, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() && n > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Maps a slice in index order.
pub fn map_slice<T, R, F>(mode: ExecMode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_indexed(mode, items.len(), |i| f(&items[i]))
}

/// Deterministic sum of `f(0..n)`.
pub fn sum_indexed<F>(mode: ExecMode, n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let partial = map_indexed(mode, chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        (lo..hi).fold(Complex64::new(0.0, 0.0), |acc, i| acc + f(i))
    });
    partial.into_iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b)
}

/// Deterministic vector-valued sum: `f(i, acc)` adds the contribution of
/// index `i` into an accumulator of length `len`.
pub fn sum_indexed_vec<F>(mode: ExecMode, n: usize, len: usize, f: F) -> Vec<Complex64>
where
    F: Fn(usize, &mut [Complex64]) + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let partial = map_indexed(mode, chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        let mut acc = vec![Complex64::new(0.0, 0.0); len];
        for i in lo..hi {
            f(i, &mut acc);
        }
        acc
    });
    let mut total = vec![Complex64::new(0.0, 0.0); len];
    for acc in partial {
        for (t, a) in total.iter_mut().zip(acc) {
            *t += a;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_bitwise() {
        let f = |i: usize| Complex64::new((i as f64).sin(), (i as f64 * 0.37).cos() / 3.0);
        let a = sum_indexed(ExecMode::Sequential, 10_000, f);
        let b = sum_indexed(ExecMode::Parallel, 10_000, f);
        assert_eq!(a, b);
        let v = map_indexed(ExecMode::Parallel, 100, |i| i * i);
        assert_eq!(v[99], 9801);
    }

    #[test]
    fn vector_sum_matches_scalar() {
        let n = 5000;
        let s = sum_indexed_vec(ExecMode::Parallel, n, 2, |i, acc| {
            acc[0] += Complex64::new(i as f64, 0.0);
            acc[1] += Complex64::new(0.0, 1.0);
        });
        assert_eq!(s[0].re, (n * (n - 1) / 2) as f64);
        assert_eq!(s[1].im, n as f64);
    }
}
