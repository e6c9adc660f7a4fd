//! Ground-truth minimum searches: `μ(r, s)` over subspace pairs of a finite
//! field, and `μ_G(r, s)` over subset pairs of a finite group.
//!
//! Both exhaustive searches share one driver. Pairs are indexed
//! `i · |B-list| + j` and the reported witness is always the pair of smallest
//! index among those attaining the minimum, so results do not depend on the
//! number of worker threads.

pub mod enumerate;
pub mod group;
pub mod subspaces;

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use enumerate::{
    enumerate_subspaces, enumerate_subspaces_containing_one, gaussian_binomial, SubspaceProfile,
};
pub use group::{builtin_group, kappa_group, mu_group_exact, mu_group_randomized, GroupSpec};
pub use subspaces::{mu_exact, mu_randomized};

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuOptions {
    /// Maximum number of pair evaluations before giving up on exhaustiveness.
    pub budget: u64,
    /// Worker threads; 0 means one per core.
    pub workers: usize,
    /// Restrict to pairs with `1 ∈ A` and `1 ∈ B` (identity for groups).
    pub canonicalize: bool,
    /// Stop as soon as a proven lower bound is reached (κ for fields).
    /// Off, the only early exit is the trivial floor `max(r, s)`.
    pub prune_at_kappa: bool,
}

impl Default for MuOptions {
    fn default() -> Self {
        MuOptions {
            budget: DEFAULT_BUDGET,
            workers: 0,
            canonicalize: true,
            prune_at_kappa: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuResult<W> {
    pub value: usize,
    pub witness_a: W,
    pub witness_b: W,
    /// False when the budget cut the search short; `value` is then only an
    /// upper bound.
    pub exhaustive: bool,
}

/// Index of the best pair found by a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Best {
    pub value: usize,
    pub index: u64,
}

/// State shared by the workers of one exhaustive search.
pub(crate) struct Shared {
    pub floor: usize,
    pub per_outer: u64,
    best_value: AtomicUsize,
    floor_index: AtomicU64,
}

impl Shared {
    /// Any pair whose partial cost already exceeds this cannot win.
    pub fn bound(&self) -> usize {
        self.best_value.load(Ordering::Relaxed)
    }

    pub fn offer(&self, b: Best) {
        self.best_value.fetch_min(b.value, Ordering::Relaxed);
        if b.value <= self.floor {
            self.floor_index.fetch_min(b.index, Ordering::Relaxed);
        }
    }

    /// True once some pair with a smaller index is known to reach the floor.
    pub fn beaten(&self, index: u64) -> bool {
        self.floor_index.load(Ordering::Relaxed) < index
    }
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))
}

/// Runs `scan(i, shared)` for every outer index and returns the smallest
/// `(value, index)` reported. `scan` must return the best pair among its own
/// indices, may stop early once [`Shared::beaten`] or the floor is hit, and
/// may skip pairs whose value is provably `> shared.bound()`.
pub(crate) fn parallel_min<F>(
    outer: u64,
    per_outer: u64,
    floor: usize,
    workers: usize,
    scan: F,
) -> Result<Option<Best>>
where
    F: Fn(u64, &Shared) -> Option<Best> + Sync,
{
    let shared = Shared {
        floor,
        per_outer,
        best_value: AtomicUsize::new(usize::MAX),
        floor_index: AtomicU64::new(u64::MAX),
    };
    let run = || {
        (0..outer)
            .into_par_iter()
            .filter_map(|i| {
                if shared.beaten(i * per_outer) {
                    return None;
                }
                let best = scan(i, &shared)?;
                shared.offer(best);
                Some(best)
            })
            .min()
    };
    Ok(pool(workers)?.install(run))
}

pub(crate) fn trial_rng(seed: u64, trial: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub(crate) fn check_dims(r: usize, s: usize, n: usize) -> Result<()> {
    if r == 0 || s == 0 || r > n || s > n {
        return Err(Error::invalid(format!(
            "r = {r}, s = {s} must lie in [1, {n}]"
        )));
    }
    Ok(())
}
