//! Row-parallel kernels. With the `parallel` feature these dispatch to rayon,
//! otherwise they run sequentially. Every kernel here writes disjoint output
//! slots, so results are bitwise identical regardless of thread count.
//! Reductions never go through this module; they are summed in index order.
//!
//! A one-thread pool also takes the sequential path: handing work to a single
//! worker only adds wake-up and spin costs.

use crate::error::{MhdError, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
fn pooled() -> bool {
    rayon::current_num_threads() > 1
}

/// Apply `f` to every `len`-sized chunk of `data`, giving each worker its own
/// scratch value built by `init`. `f` receives the chunk index.
pub(crate) fn chunks_with_scratch<T, S, I, F>(data: &mut [T], len: usize, init: I, f: F)
where
    T: Send,
    I: Fn() -> S + Send + Sync,
    F: Fn(&mut S, usize, &mut [T]) + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if pooled() {
        data.par_chunks_mut(len)
            .enumerate()
            .for_each_init(init, |s, (i, chunk)| f(s, i, chunk));
        return;
    }
    let mut s = init();
    data.chunks_mut(len)
        .enumerate()
        .for_each(|(i, chunk)| f(&mut s, i, chunk));
}

/// Fill `out[i] = f(i)`.
pub(crate) fn fill<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if pooled() {
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
        return;
    }
    out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
}

/// Call `f(scratch, i)` for every `i < count`.
pub(crate) fn for_each_index<S, I, F>(count: usize, init: I, f: F)
where
    I: Fn() -> S + Send + Sync,
    F: Fn(&mut S, usize) + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if pooled() {
        (0..count).into_par_iter().for_each_init(init, |s, i| f(s, i));
        return;
    }
    let mut s = init();
    (0..count).for_each(|i| f(&mut s, i));
}

/// Map independent jobs, preserving input order in the output.
pub(crate) fn map_jobs<J, R, F>(jobs: Vec<J>, f: F) -> Vec<R>
where
    J: Send,
    R: Send,
    F: Fn(J) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if pooled() {
        return jobs.into_par_iter().map(f).collect();
    }
    jobs.into_iter().map(f).collect()
}

/// Human-readable label for the compiled execution mode.
pub fn execution_mode() -> &'static str {
    if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    }
}

/// Worker threads available to the kernels.
pub fn thread_count() -> usize {
    #[cfg(feature = "parallel")]
    return rayon::current_num_threads();
    #[cfg(not(feature = "parallel"))]
    return 1;
}

/// Run `f` on a pool of `threads` workers, or on the current pool for `None`.
#[cfg(feature = "parallel")]
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<R> + Send) -> Result<R> {
    match threads {
        None => f(),
        Some(0) => Err(MhdError::config("threads", "must be >= 1")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| MhdError::config("threads", e.to_string()))?
            .install(f),
    }
}

/// Without the `parallel` feature everything runs on the calling thread.
#[cfg(not(feature = "parallel"))]
pub fn with_threads<R>(threads: Option<usize>, f: impl FnOnce() -> Result<R>) -> Result<R> {
    match threads {
        Some(0) => Err(MhdError::config("threads", "must be >= 1")),
        Some(t) if t > 1 => {
            eprintln!("warning: built without the `parallel` feature; ignoring {t} threads");
            f()
        }
        _ => f(),
    }
}
