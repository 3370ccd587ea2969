use crate::simulation::Execution;

/// Maps `f` over `0..n`, collecting results in index order.
///
/// With [`Execution::Parallel`] and the `parallel` feature the work runs on
/// the rayon pool; otherwise it runs on the calling thread. Output order and
/// values never depend on which path ran.
pub(crate) fn map_indexed<R, F>(n: usize, exec: Execution, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel => (0..n).map(f).collect(),
        Execution::Sequential => (0..n).map(f).collect(),
    }
}
