//! Execution shim for corpus-level sweeps: data-parallel with the `parallel`
//! feature (the default), plain iteration without it. The sequential path is
//! always available for benchmarking both sides.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Parallel,
    Sequential,
}

/// Maps `f` over the inputs, in parallel when built with the `parallel`
/// feature. Output order matches input order either way.
#[cfg(feature = "parallel")]
pub fn par_map<I: Sync, O: Send>(items: &[I], f: impl Fn(&I) -> O + Sync + Send) -> Vec<O> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<I: Sync, O: Send>(items: &[I], f: impl Fn(&I) -> O + Sync + Send) -> Vec<O> {
    items.iter().map(f).collect()
}

pub fn seq_map<I, O>(items: &[I], f: impl Fn(&I) -> O) -> Vec<O> {
    items.iter().map(f).collect()
}

pub fn map_mode<I: Sync, O: Send>(
    mode: ExecMode,
    items: &[I],
    f: impl Fn(&I) -> O + Sync + Send,
) -> Vec<O> {
    match mode {
        ExecMode::Parallel => par_map(items, f),
        ExecMode::Sequential => seq_map(items, f),
    }
}
