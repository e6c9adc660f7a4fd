//! Finite groups given by Cayley tables (order ≤ 64), their subgroup orders,
//! `κ_G` and the minimum product-set size `μ_G(r, s)`.
//!
//! Subsets are `u64` bitmasks. For a fixed `A` the right translates
//! `A·g` are precomputed, so `|AB|` is the popcount of an OR over `b ∈ B`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_dims, parallel_min, pool, trial_rng, Best, MuOptions, MuResult};
use crate::error::{Error, Result};
use crate::kappa::{self, AdmissibleDegreeSet, KappaResult};

pub const MAX_GROUP_ORDER: usize = 64;

/// JSON input format: `{"order": n, "identity": e, "cayley": [[...], ...]}`
/// with `cayley[a][b]` the index of `a·b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    pub order: usize,
    pub identity: usize,
    pub cayley: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    order: usize,
    cayley: Vec<Vec<usize>>,
    identity: usize,
    subgroup_orders: Vec<u64>,
}

impl GroupSpec {
    pub fn from_table(table: GroupTable) -> Result<Self> {
        let GroupTable {
            order,
            identity,
            cayley,
        } = table;
        let bad = |m: String| Err(Error::InvalidGroup(m));
        if order == 0 || order > MAX_GROUP_ORDER {
            return bad(format!("order {order} outside [1, {MAX_GROUP_ORDER}]"));
        }
        if cayley.len() != order || cayley.iter().any(|row| row.len() != order) {
            return bad(format!("table is not {order}×{order}"));
        }
        if identity >= order {
            return bad(format!("identity index {identity} out of range"));
        }
        let full: u64 = if order == 64 {
            u64::MAX
        } else {
            (1 << order) - 1
        };
        #[allow(clippy::needless_range_loop)]
        for a in 0..order {
            let mut row_mask = 0u64;
            let mut col_mask = 0u64;
            for b in 0..order {
                let (x, y) = (cayley[a][b], cayley[b][a]);
                if x >= order || y >= order {
                    return bad(format!("entry out of range in row {a}"));
                }
                row_mask |= 1 << x;
                col_mask |= 1 << y;
            }
            if row_mask != full || col_mask != full {
                return bad(format!("row or column {a} is not a permutation"));
            }
            if cayley[identity][a] != a || cayley[a][identity] != a {
                return bad(format!("{identity} is not an identity"));
            }
        }
        for a in 0..order {
            for b in 0..order {
                let ab = cayley[a][b];
                for c in 0..order {
                    if cayley[ab][c] != cayley[a][cayley[b][c]] {
                        return bad(format!("({a}·{b})·{c} ≠ {a}·({b}·{c})"));
                    }
                }
            }
        }
        let mut spec = GroupSpec {
            order,
            cayley,
            identity,
            subgroup_orders: Vec::new(),
        };
        spec.subgroup_orders = spec
            .subgroups()
            .iter()
            .map(|m| m.count_ones() as u64)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: GroupTable =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("group JSON: {e}")))?;
        Self::from_table(table)
    }

    pub fn to_table(&self) -> GroupTable {
        GroupTable {
            order: self.order,
            identity: self.identity,
            cayley: self.cayley.clone(),
        }
    }

    /// Builds the table of a group with elements `0..order` and product `mul`.
    pub fn from_fn(
        order: usize,
        identity: usize,
        mul: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let cayley = (0..order)
            .map(|a| (0..order).map(|b| mul(a, b)).collect())
            .collect();
        Self::from_table(GroupTable {
            order,
            identity,
            cayley,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a][b]
    }

    pub fn subgroup_orders(&self) -> &[u64] {
        &self.subgroup_orders
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.cayley[a][b] == self.cayley[b][a]))
    }

    /// Closure of a nonempty subset under the product; for a finite group this
    /// is the generated subgroup.
    fn closure(&self, mut mask: u64) -> u64 {
        mask |= 1 << self.identity;
        loop {
            let mut next = mask;
            for a in bits(mask) {
                for b in bits(mask) {
                    next |= 1 << self.cayley[a][b];
                }
            }
            if next == mask {
                return mask;
            }
            mask = next;
        }
    }

    /// Every subgroup as a bitmask: joins of cyclic subgroups until stable.
    pub fn subgroups(&self) -> Vec<u64> {
        let mut all: BTreeSet<u64> = (0..self.order).map(|g| self.closure(1 << g)).collect();
        let cyclic: Vec<u64> = all.iter().copied().collect();
        let mut frontier: Vec<u64> = cyclic.clone();
        while !frontier.is_empty() {
            let mut fresh = Vec::new();
            for &h in &frontier {
                for &c in &cyclic {
                    if h & c == c {
                        continue;
                    }
                    let j = self.closure(h | c);
                    if all.insert(j) {
                        fresh.push(j);
                    }
                }
            }
            frontier = fresh;
        }
        all.into_iter().collect()
    }

    pub fn degree_set(&self) -> AdmissibleDegreeSet {
        AdmissibleDegreeSet::new(self.order as u64, self.subgroup_orders.clone())
            .expect("subgroup orders contain 1 and divide the group order")
    }

    /// `|AB|` for element lists.
    pub fn product_size(&self, a: &[usize], b: &[usize]) -> usize {
        let mut mask = 0u64;
        for &x in a {
            for &y in b {
                mask |= 1 << self.cayley[x][y];
            }
        }
        mask.count_ones() as usize
    }
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let i = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(i)
    })
}

/// Named groups: `cyclic:n`, `product:n,m` (`Z/n × Z/m`), and
/// `Z7xZ3semidirect` (`Z/7 ⋊ Z/3` with the generator of `Z/3` acting as
/// `x ↦ 2x`; element `(a, b)` has index `7b + a`).
pub fn builtin_group(name: &str) -> Result<GroupSpec> {
    let name = name.trim();
    let parse = |s: &str| -> Result<usize> {
        s.trim()
            .parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| Error::Parse(format!("bad group parameter {s:?} in {name:?}")))
    };
    if let Some(n) = name.strip_prefix("cyclic:") {
        let n = parse(n)?;
        return GroupSpec::from_fn(n, 0, |a, b| (a + b) % n);
    }
    if let Some(rest) = name.strip_prefix("product:") {
        let (n, m) = rest
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected product:n,m, got {name:?}")))?;
        let (n, m) = (parse(n)?, parse(m)?);
        let order = n
            .checked_mul(m)
            .filter(|&o| o <= MAX_GROUP_ORDER)
            .ok_or_else(|| {
                Error::InvalidGroup(format!("order of {name} exceeds {MAX_GROUP_ORDER}"))
            })?;
        return GroupSpec::from_fn(order, 0, |x, y| {
            let (a, b) = (x % n, x / n);
            let (c, d) = (y % n, y / n);
            (a + c) % n + n * ((b + d) % m)
        });
    }
    if name == "Z7xZ3semidirect" {
        const TWIST: [usize; 3] = [1, 2, 4];
        return GroupSpec::from_fn(21, 0, |x, y| {
            let (a, b) = (x % 7, x / 7);
            let (c, d) = (y % 7, y / 7);
            (a + TWIST[b] * c) % 7 + 7 * ((b + d) % 3)
        });
    }
    Err(Error::Parse(format!("unknown group {name:?}")))
}

/// `κ_G(r, s)`: the κ minimization over the subgroup orders of `G`.
pub fn kappa_group(r: usize, s: usize, group: &GroupSpec) -> Result<KappaResult> {
    kappa::kappa_of(r as u64, s as u64, &group.degree_set())
}

/// Masks of all `k`-subsets of the pool, in increasing order of their index
/// bitmask (Gosper's hack), mapped through `pool`.
fn subsets(pool: &[usize], k: usize) -> impl Iterator<Item = u64> + '_ {
    let m = pool.len();
    let mut cur: Option<u64> = if k > m {
        None
    } else if k == 0 {
        Some(0)
    } else if k == 64 {
        Some(u64::MAX)
    } else {
        Some((1u64 << k) - 1)
    };
    std::iter::from_fn(move || {
        let c = cur?;
        cur = if c == 0 {
            None
        } else {
            let low = c & c.wrapping_neg();
            c.checked_add(low).and_then(|ripple| {
                let next = (((ripple ^ c) >> 2) / low) | ripple;
                (m == 64 || next >> m == 0).then_some(next)
            })
        };
        Some(c)
    })
}

fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).ok()
}

fn map_mask(pool_mask: u64, pool: &[usize]) -> u64 {
    bits(pool_mask).fold(0, |acc, i| acc | 1 << pool[i])
}

fn mask_elements(mask: u64) -> Vec<usize> {
    bits(mask).collect()
}

/// Exact `μ_G(r, s)` over all subset pairs (canonical: both contain the
/// identity, justified by `|a⁻¹A · Bb⁻¹| = |AB|`).
pub fn mu_group_exact(
    group: &GroupSpec,
    r: usize,
    s: usize,
    opts: &MuOptions,
) -> Result<MuResult<Vec<usize>>> {
    let order = group.order();
    check_dims(r, s, order)?;
    let canonical = opts.canonicalize;
    let pool: Vec<usize> = if canonical {
        (0..order).filter(|&g| g != group.identity).collect()
    } else {
        (0..order).collect()
    };
    let base = if canonical { 1u64 << group.identity } else { 0 };
    let (ka, kb) = if canonical { (r - 1, s - 1) } else { (r, s) };
    let count_a = binomial(pool.len(), ka).ok_or(Error::Overflow)?;
    let count_b = binomial(pool.len(), kb).ok_or(Error::Overflow)?;
    let total = count_a as u128 * count_b as u128;
    if total > opts.budget as u128 {
        return group_partial_scan(group, &pool, base, ka, kb, opts.budget);
    }
    let outer: Vec<u64> = subsets(&pool, ka)
        .map(|m| base | map_mask(m, &pool))
        .collect();
    let floor = r.max(s);

    let best = parallel_min(
        outer.len() as u64,
        count_b,
        floor,
        opts.workers,
        |i, shared| {
            let a = outer[i as usize];
            let translates: Vec<u64> = (0..order)
                .map(|g| bits(a).fold(0u64, |acc, x| acc | 1 << group.cayley[x][g]))
                .collect();
            let start = if canonical {
                translates[group.identity]
            } else {
                0
            };
            let pool_translates: Vec<u64> = pool.iter().map(|&g| translates[g]).collect();
            let mut local: Option<Best> = None;
            for (j, bmask) in subsets(&pool, kb).enumerate() {
                let index = i * shared.per_outer + j as u64;
                if j % 1024 == 0 && shared.beaten(index) {
                    break;
                }
                // a pair must beat the local best strictly and must not exceed the
                // global best to matter
                let cutoff = local
                    .map_or(usize::MAX, |l| l.value)
                    .min(shared.bound().saturating_add(1));
                let mut acc = start;
                let mut pruned = false;
                for k in bits(bmask) {
                    acc |= pool_translates[k];
                    if acc.count_ones() as usize >= cutoff {
                        pruned = true;
                        break;
                    }
                }
                if pruned {
                    continue;
                }
                let value = acc.count_ones() as usize;
                let best = Best { value, index };
                local = Some(best);
                shared.offer(best);
                if value <= shared.floor {
                    break;
                }
            }
            local
        },
    )?;
    let best = best.ok_or_else(|| Error::invalid("search produced no pair"))?;
    let j = best.index % count_b;
    let bmask = base
        | map_mask(
            subsets(&pool, kb)
                .nth(j as usize)
                .expect("witness index in range"),
            &pool,
        );
    Ok(MuResult {
        value: best.value,
        witness_a: mask_elements(outer[(best.index / count_b) as usize]),
        witness_b: mask_elements(bmask),
        exhaustive: true,
    })
}

fn group_partial_scan(
    group: &GroupSpec,
    pool: &[usize],
    base: u64,
    ka: usize,
    kb: usize,
    budget: u64,
) -> Result<MuResult<Vec<usize>>> {
    let mut best: Option<(usize, u64, u64)> = None;
    let mut seen = 0u64;
    'outer: for am in subsets(pool, ka) {
        let a = base | map_mask(am, pool);
        for bm in subsets(pool, kb) {
            if seen >= budget.max(1) {
                break 'outer;
            }
            seen += 1;
            let b = base | map_mask(bm, pool);
            let value = group.product_size(&mask_elements(a), &mask_elements(b));
            if best.is_none_or(|(v, _, _)| value < v) {
                best = Some((value, a, b));
            }
        }
    }
    let (value, a, b) = best.ok_or_else(|| Error::invalid("budget admits no pair"))?;
    Ok(MuResult {
        value,
        witness_a: mask_elements(a),
        witness_b: mask_elements(b),
        exhaustive: false,
    })
}

fn random_subset<R: Rng>(group: &GroupSpec, k: usize, rng: &mut R) -> Vec<usize> {
    let others: Vec<usize> = (0..group.order())
        .filter(|&g| g != group.identity)
        .collect();
    let mut out = vec![group.identity];
    out.extend(others.choose_multiple(rng, k - 1).copied());
    out
}

fn group_trial(
    group: &GroupSpec,
    r: usize,
    s: usize,
    seed: u64,
    trial: u64,
) -> (usize, Vec<usize>, Vec<usize>) {
    let mut rng = trial_rng(seed, trial);
    let mut a = random_subset(group, r, &mut rng);
    let mut b = random_subset(group, s, &mut rng);
    let mut cur = group.product_size(&a, &b);
    let floor = r.max(s);
    let order = group.order();
    let patience = 4 * order * (r + s);
    let mut stale = 0;
    let movable_a = r > 1 && r < order;
    let movable_b = s > 1 && s < order;
    while cur > floor && stale < patience && (movable_a || movable_b) {
        let side_a = match (movable_a, movable_b) {
            (true, false) => true,
            (false, true) => false,
            _ => rng.gen_bool(0.5),
        };
        let set = if side_a { &a } else { &b };
        let slot = rng.gen_range(1..set.len());
        let g = rng.gen_range(0..order);
        stale += 1;
        if set.contains(&g) {
            continue;
        }
        let mut cand = set.clone();
        cand[slot] = g;
        let value = if side_a {
            group.product_size(&cand, &b)
        } else {
            group.product_size(&a, &cand)
        };
        if value <= cur {
            if value < cur {
                stale = 0;
            }
            cur = value;
            if side_a {
                a = cand;
            } else {
                b = cand;
            }
        }
    }
    a.sort_unstable();
    b.sort_unstable();
    (cur, a, b)
}

/// Upper bound on `μ_G(r, s)` from seeded random restarts with local descent.
pub fn mu_group_randomized(
    group: &GroupSpec,
    r: usize,
    s: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<MuResult<Vec<usize>>> {
    check_dims(r, s, group.order())?;
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let best = pool(workers)?.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let (v, a, b) = group_trial(group, r, s, seed, t);
                (v, t, a, b)
            })
            .min_by_key(|(v, t, _, _)| (*v, *t))
            .expect("trials > 0")
    });
    Ok(MuResult {
        value: best.0,
        witness_a: best.2,
        witness_b: best.3,
        exhaustive: false,
    })
}
