//! Seeded replica ensembles on a bounded worker pool.
//!
//! Replica `r` always draws from stream `r` of the run seed, and results are
//! collected in stream order, so output never depends on the thread count
//! or on completion order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::initial::InitialDatum;
use crate::noise::sample_noise;
use crate::solver::{solve, Mode, SolveOptions, Trajectory};

/// Evaluates `task(stream_id)` for `stream_id in 0..replicas`.
///
/// `threads = None` uses the ambient rayon pool; `Some(k)` builds a dedicated pool of `k` workers.
/// The first failing replica (lowest stream id) is reported.
pub fn run_replicas<T, F>(replicas: u64, threads: Option<usize>, task: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let work = || (0..replicas).into_par_iter().map(&task).collect::<Vec<Result<T>>>();
    let results = match threads {
        None => work(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?
            .install(work),
    };
    results.into_iter().collect()
}

/// Like [`run_replicas`] but keeps every outcome, so a failing replica does not discard the others.
pub fn run_replicas_partial<T, F>(replicas: u64, threads: Option<usize>, task: F) -> Result<Vec<Result<T>>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let work = || (0..replicas).into_par_iter().map(&task).collect::<Vec<Result<T>>>();
    Ok(match threads {
        None => work(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?
            .install(work),
    })
}

/// Solves one replica per stream of `seed`, mapping each trajectory through `reduce`.
pub fn she_ensemble<T, F>(
    grid: &GridSpec,
    ic: &InitialDatum,
    mode: Mode,
    options: &SolveOptions,
    seed: u64,
    replicas: u64,
    threads: Option<usize>,
    reduce: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Trajectory) -> Result<T> + Sync + Send,
{
    run_replicas(replicas, threads, |stream| {
        let noise = sample_noise(grid, seed, stream);
        let mut traj = solve(grid, ic, &noise, mode, options)?;
        traj.seed = Some(seed);
        traj.stream_id = Some(stream);
        reduce(traj)
    })
}
