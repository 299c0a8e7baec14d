//! Data-parallel loops over index ranges.
//!
//! With the `parallel` feature the loops run on the rayon pool; without it, or
//! inside [`sequential`], they run on the calling thread. Reductions used in
//! the crate are associative and commutative on integers, so both paths give
//! bit-identical results.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with every loop in this module executed sequentially on the
/// current thread.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    let previous = FORCE_SEQUENTIAL.with(|flag| flag.replace(true));
    let out = f();
    FORCE_SEQUENTIAL.with(|flag| flag.set(previous));
    out
}

#[cfg(feature = "parallel")]
fn parallel_enabled() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.with(Cell::get)
}

/// Worker threads available to parallel loops (1 when running sequentially).
pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        return rayon::current_num_threads();
    }
    1
}

/// Sizes the global worker pool. Without the `parallel` feature this only
/// checks the argument.
pub fn set_threads(n: usize) -> Result<(), String> {
    if n == 0 {
        return Err("thread count must be positive".into());
    }
    #[cfg(feature = "parallel")]
    return rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string());
    #[cfg(not(feature = "parallel"))]
    Ok(())
}

/// Folds `0..n` into per-chunk accumulators and merges them.
///
/// `init` builds an accumulator, `fold` adds index `i` to it, `merge`
/// combines two accumulators. The result must not depend on chunking.
pub fn fold_indices<A, I, F, M>(n: u64, init: I, fold: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(A, u64) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() && n > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().fold(&init, &fold).reduce(&init, &merge);
    }
    let _ = &merge;
    (0..n).fold(init(), fold)
}

/// Maps every index in `0..n` and returns results in index order.
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() && n > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Counts indices in `0..n` satisfying `pred`.
pub fn count_indices<F>(n: u64, pred: F) -> u64
where
    F: Fn(u64) -> bool + Sync + Send,
{
    fold_indices(n, || 0u64, |acc, i| acc + u64::from(pred(i)), |a, b| a + b)
}

/// Adds `b` into `a` element-wise.
pub fn add_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_matches_parallel() {
        let par = count_indices(10_000, |i| i % 7 == 3);
        let seq = sequential(|| count_indices(10_000, |i| i % 7 == 3));
        assert_eq!(par, seq);
        assert_eq!(seq, (0..10_000u64).filter(|i| i % 7 == 3).count() as u64);
    }

    #[test]
    fn map_keeps_index_order() {
        assert_eq!(map_indices(5, |i| i * i), vec![0, 1, 4, 9, 16]);
    }

    #[test]
    fn sequential_flag_restores() {
        sequential(|| assert_eq!(threads(), 1));
        assert!(threads() >= 1);
    }
}
