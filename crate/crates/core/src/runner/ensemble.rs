//! Trajectory-parallel ensembles.
//!
//! Trajectory `i` always draws from `stream(seed, i)` and the trajectories
//! are grouped in fixed chunks. Accumulators hold integer sums, so the
//! result is the same for any number of workers and any completion order.

use rayon::prelude::*;

use crate::clifford::{evolve_otoc_with, CircuitParams};
use crate::dp::{run_with, BranchingParams, InitialCondition};
use crate::observables::{EnsembleAccumulator, InfoAccumulator};
use crate::rng::stream;
use crate::stabilizer::{GeneratorSet, InitCase};
use crate::Result;

const CHUNK: u64 = 64;

fn chunked<A, F, M>(n_traj: u64, empty: impl Fn() -> A + Sync + Send, run: F, merge: M) -> Result<A>
where
    A: Send,
    F: Fn(&mut A, u64) -> Result<()> + Sync + Send,
    M: Fn(&mut A, &A) -> Result<()> + Sync + Send,
{
    let chunks = n_traj.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = empty();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n_traj) {
                run(&mut acc, i)?;
            }
            Ok(acc)
        })
        .try_reduce(&empty, |mut a, b| {
            merge(&mut a, &b)?;
            Ok(a)
        })
}

/// Particle-process ensemble of `n_traj` trajectories; per-site counts are
/// kept at the times in `slices`.
pub fn dp_ensemble(
    params: &BranchingParams,
    init: &InitialCondition,
    n: usize,
    depth: usize,
    n_traj: u64,
    seed: u64,
    slices: &[usize],
) -> Result<EnsembleAccumulator> {
    init.occupation(n)?;
    let empty = || EnsembleAccumulator::new(n, depth, init.origin()).with_slices(slices);
    chunked(
        n_traj,
        empty,
        |acc, i| {
            let mut rng = stream(seed, i);
            run_with(init, params, n, depth, &mut rng, |t, occ| {
                acc.observe(t, occ)
            })?;
            acc.finish_trajectory();
            Ok(())
        },
        EnsembleAccumulator::merge,
    )
}

/// Occupation ensemble of the Heisenberg-evolved `X_0` in the Clifford circuit.
pub fn otoc_ensemble(
    n: usize,
    p: f64,
    depth: usize,
    n_traj: u64,
    seed: u64,
    slices: &[usize],
) -> Result<EnsembleAccumulator> {
    let params = CircuitParams::new(n, p, depth, seed)?;
    let empty = || EnsembleAccumulator::new(n, depth, 0).with_slices(slices);
    chunked(
        n_traj,
        empty,
        |acc, i| {
            let mut rng = stream(seed, i);
            evolve_otoc_with(&params, &mut rng, |t, occ| acc.observe(t, occ));
            acc.finish_trajectory();
            Ok(())
        },
        EnsembleAccumulator::merge,
    )
}

/// Coherent informations and Bell ranks of stabilizer realizations,
/// recorded at `times` (clipped to `depth`).
#[allow(clippy::too_many_arguments)]
pub fn info_ensemble(
    case: InitCase,
    n: usize,
    k: usize,
    p: f64,
    depth: usize,
    n_traj: u64,
    seed: u64,
    times: &[usize],
) -> Result<InfoAccumulator> {
    GeneratorSet::init(case, n, k)?;
    let times: Vec<usize> = times.iter().copied().filter(|&t| t <= depth).collect();
    let last = times.iter().copied().max().unwrap_or(0);
    let empty = || InfoAccumulator::new(k, &times);
    chunked(
        n_traj,
        empty,
        |acc, i| {
            let mut rng = stream(seed, i);
            let mut g = GeneratorSet::init(case, n, k)?;
            for t in 0..=last {
                if t > 0 {
                    g.step(p, &mut rng)?;
                }
                if acc.times().binary_search(&t).is_ok() {
                    let info = g.coherent_info();
                    acc.observe(t, info.ic_e, info.ic_s, g.bell_rank());
                }
            }
            acc.finish_realization();
            Ok(())
        },
        InfoAccumulator::merge,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::{branching_probs, QuditDim};

    fn pool(threads: usize) -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
    }

    #[test]
    fn independent_of_worker_count() {
        let params = branching_probs(QuditDim::Finite(2), 0.2).unwrap();
        let init = InitialCondition::SingleSite(0);
        let run = || dp_ensemble(&params, &init, 32, 40, 300, 11, &[10, 40]).unwrap();
        let a = pool(1).install(run);
        let b = pool(4).install(run);
        assert_eq!(a, b);
        assert_eq!(a.n_traj(), 300);

        let run = || otoc_ensemble(16, 0.1, 20, 130, 5, &[]).unwrap();
        assert_eq!(pool(1).install(run), pool(3).install(run));

        let run = || info_ensemble(InitCase::PureAll, 8, 2, 0.2, 10, 70, 5, &[0, 5, 10]).unwrap();
        assert_eq!(pool(1).install(run), pool(3).install(run));
    }

    #[test]
    fn info_at_time_zero() {
        let acc = info_ensemble(InitCase::MixedS2MixedE, 8, 2, 0.5, 4, 3, 1, &[0, 4, 9]).unwrap();
        assert_eq!(acc.times(), &[0, 4]);
        let c = crate::observables::finalize_info(&acc).unwrap();
        // nothing radiated yet: I_c(A>E) = 0 - k
        assert_eq!(c.ic_e[0], -2.0);
        assert_eq!(c.fidelity[0], 1.0 / 16.0);
    }
}
