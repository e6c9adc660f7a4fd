//! `μ(r, s) = min dim⟨AB⟩` over subspace pairs of `GF(p^n)`.
//!
//! Canonical mode only visits pairs with `1 ∈ A` and `1 ∈ B`. That loses
//! nothing: for nonzero `a ∈ A`, `b ∈ B` the map `x ↦ x/(ab)` is an
//! `F_p`-linear bijection sending `⟨AB⟩` onto `⟨(a⁻¹A)(b⁻¹B)⟩`.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::enumerate::{gaussian_binomial, ProfileIter};
use super::{check_dims, parallel_min, pool, trial_rng, Best, MuOptions, MuResult};
use crate::error::{Error, Result};
use crate::field::{ExtensionField, FieldElement};
use crate::kappa;
use crate::linalg::{Echelon, Subspace};
use crate::product::product_dim;

fn list_count(field: &ExtensionField, r: usize, canonical: bool) -> Option<u128> {
    let q = field.p() as u64;
    if canonical {
        gaussian_binomial(q, field.n() - 1, r - 1)
    } else {
        gaussian_binomial(q, field.n(), r)
    }
}

fn witness(field: &Arc<ExtensionField>, r: usize, canonical: bool, index: u64) -> Subspace {
    let rows = ProfileIter::for_field(field, r, canonical)
        .nth(index as usize)
        .expect("witness index within the enumeration");
    Subspace::from_rref_unchecked(field, rows)
}

/// Exact `μ(r, s)` by exhaustive enumeration, subject to `opts.budget`.
///
/// If the pair count exceeds the budget, the first `budget` pairs in
/// enumeration order are scanned and the result has `exhaustive == false`.
pub fn mu_exact(
    field: &Arc<ExtensionField>,
    r: usize,
    s: usize,
    opts: &MuOptions,
) -> Result<MuResult<Subspace>> {
    let n = field.n();
    check_dims(r, s, n)?;
    let canonical = opts.canonicalize;
    let count_a = list_count(field, r, canonical).ok_or(Error::Overflow)?;
    let count_b = list_count(field, s, canonical).ok_or(Error::Overflow)?;
    let total = count_a.checked_mul(count_b).ok_or(Error::Overflow)?;
    let floor = if opts.prune_at_kappa {
        kappa::kappa_of(r as u64, s as u64, &kappa::divisors(n as u64)?)?.value as usize
    } else {
        r.max(s)
    };

    if total > opts.budget as u128 {
        return partial_scan(field, r, s, opts.budget, canonical);
    }
    let count_b = count_b as u64;
    let outer: Vec<Vec<FieldElement>> = ProfileIter::for_field(field, r, canonical).collect();

    let best = parallel_min(
        outer.len() as u64,
        count_b,
        floor,
        opts.workers,
        |i, shared| {
            let a = &outer[i as usize];
            let mut local: Option<Best> = None;
            for (j, b) in ProfileIter::for_field(field, s, canonical).enumerate() {
                let index = i * shared.per_outer + j as u64;
                if shared.beaten(index) {
                    break;
                }
                let value = product_dim(field, a, &b);
                if local.is_none_or(|l| value < l.value) {
                    local = Some(Best { value, index });
                    if value <= shared.floor {
                        break;
                    }
                }
            }
            local
        },
    )?
    .expect("at least one pair");

    Ok(MuResult {
        value: best.value,
        witness_a: witness(field, r, canonical, best.index / count_b),
        witness_b: witness(field, s, canonical, best.index % count_b),
        exhaustive: true,
    })
}

fn partial_scan(
    field: &Arc<ExtensionField>,
    r: usize,
    s: usize,
    budget: u64,
    canonical: bool,
) -> Result<MuResult<Subspace>> {
    let mut best: Option<(usize, Vec<FieldElement>, Vec<FieldElement>)> = None;
    let mut seen = 0u64;
    'outer: for a in ProfileIter::for_field(field, r, canonical) {
        for b in ProfileIter::for_field(field, s, canonical) {
            if seen >= budget.max(1) {
                break 'outer;
            }
            seen += 1;
            let value = product_dim(field, &a, &b);
            if best.as_ref().is_none_or(|(v, _, _)| value < *v) {
                best = Some((value, a.clone(), b));
            }
        }
    }
    let (value, a, b) = best.expect("budget admits at least one pair");
    Ok(MuResult {
        value,
        witness_a: Subspace::from_rref_unchecked(field, a),
        witness_b: Subspace::from_rref_unchecked(field, b),
        exhaustive: false,
    })
}

/// Random generator list `[1, g_1, …, g_{r−1}]` of an `r`-subspace containing 1;
/// the span is uniform among such subspaces.
fn random_generators<R: Rng>(field: &ExtensionField, r: usize, rng: &mut R) -> Vec<FieldElement> {
    let mut ech = Echelon::new(field.p(), field.n());
    let one = field.one();
    ech.insert(one.coeffs().to_vec());
    let mut gens = vec![one];
    while gens.len() < r {
        let v = random_element(field, rng);
        if ech.insert(v.coeffs().to_vec()) {
            gens.push(v);
        }
    }
    gens
}

fn random_element<R: Rng>(field: &ExtensionField, rng: &mut R) -> FieldElement {
    field.element_from_index(rng.gen_range(0..field.order()))
}

fn independent(field: &ExtensionField, gens: &[FieldElement]) -> bool {
    let mut ech = Echelon::new(field.p(), field.n());
    gens.iter().all(|g| ech.insert(g.coeffs().to_vec()))
}

/// One seeded trial: a uniform canonical pair followed by a local descent that
/// replaces single generators (never the leading 1) while the product
/// dimension does not grow.
fn field_trial(
    field: &ExtensionField,
    r: usize,
    s: usize,
    seed: u64,
    trial: u64,
) -> (usize, Vec<FieldElement>, Vec<FieldElement>) {
    let mut rng = trial_rng(seed, trial);
    let mut a = random_generators(field, r, &mut rng);
    let mut b = random_generators(field, s, &mut rng);
    let mut cur = product_dim(field, &a, &b);
    let floor = r.max(s);
    let patience = 8 * field.n() * (r + s);
    let mut stale = 0;
    while cur > floor && stale < patience && (r > 1 || s > 1) {
        let side_a = if r == 1 {
            false
        } else if s == 1 {
            true
        } else {
            rng.gen_bool(0.5)
        };
        let gens = if side_a { &a } else { &b };
        let slot = rng.gen_range(1..gens.len());
        let mut cand = gens.clone();
        cand[slot] = random_element(field, &mut rng);
        stale += 1;
        if !independent(field, &cand) {
            continue;
        }
        let value = if side_a {
            product_dim(field, &cand, &b)
        } else {
            product_dim(field, &a, &cand)
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
    (cur, a, b)
}

/// Upper bound on `μ(r, s)` from `trials` seeded random restarts with local
/// descent. Reproducible for a given seed regardless of `workers`.
pub fn mu_randomized(
    field: &Arc<ExtensionField>,
    r: usize,
    s: usize,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<MuResult<Subspace>> {
    check_dims(r, s, field.n())?;
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let best = pool(workers)?.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let (value, a, b) = field_trial(field, r, s, seed, t);
                (value, t, a, b)
            })
            .min_by_key(|(value, t, _, _)| (*value, *t))
            .expect("trials > 0")
    });
    Ok(MuResult {
        value: best.0,
        witness_a: Subspace::span(field, &best.2)?,
        witness_b: Subspace::span(field, &best.3)?,
        exhaustive: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::product_span;

    fn gf(p: u32, n: usize) -> Arc<ExtensionField> {
        Arc::new(ExtensionField::new(p, n).unwrap())
    }

    fn opts() -> MuOptions {
        MuOptions::default()
    }

    #[test]
    fn trivial_and_small_cases() {
        let res = mu_exact(&gf(2, 2), 1, 1, &opts()).unwrap();
        assert_eq!(res.value, 1);
        assert!(res.exhaustive);
        let res = mu_exact(&gf(2, 4), 3, 3, &opts()).unwrap();
        assert_eq!(res.value, 4);
        let ab = product_span(&res.witness_a, &res.witness_b).unwrap();
        assert_eq!(ab.dim(), res.value);
        assert_eq!(res.witness_a.dim(), 3);
    }

    #[test]
    fn pruned_and_unpruned_agree() {
        let f = gf(2, 4);
        for r in 1..=4 {
            for s in 1..=4 {
                let a = mu_exact(&f, r, s, &opts()).unwrap();
                let b = mu_exact(
                    &f,
                    r,
                    s,
                    &MuOptions {
                        prune_at_kappa: true,
                        ..opts()
                    },
                )
                .unwrap();
                assert_eq!(a.value, b.value);
            }
        }
    }

    #[test]
    fn budget_cut_reports_partial_bound() {
        let f = gf(2, 5);
        let res = mu_exact(
            &f,
            3,
            3,
            &MuOptions {
                budget: 10,
                ..opts()
            },
        )
        .unwrap();
        assert!(!res.exhaustive);
        assert!(res.value >= 5);
        let ab = product_span(&res.witness_a, &res.witness_b).unwrap();
        assert_eq!(ab.dim(), res.value);
    }

    #[test]
    fn invalid_dimensions() {
        assert!(mu_exact(&gf(2, 3), 0, 1, &opts()).is_err());
        assert!(mu_exact(&gf(2, 3), 1, 4, &opts()).is_err());
        assert!(mu_randomized(&gf(2, 3), 1, 1, 0, 1, 1).is_err());
    }

    #[test]
    fn randomized_is_seeded_and_bounded() {
        let f = gf(2, 6);
        let a = mu_randomized(&f, 2, 3, 50, 7, 1).unwrap();
        let b = mu_randomized(&f, 2, 3, 50, 7, 4).unwrap();
        assert_eq!(a, b);
        assert!(a.value >= 4); // κ over {1,2,3,6} for (2,3) is 4
        let one = mu_randomized(&f, 6, 6, 1, 3, 1).unwrap();
        assert!(one.value <= 6);
    }

    #[test]
    fn randomized_finds_the_subfield() {
        // only A = B = F_8 reaches dimension 3
        let f = gf(2, 6);
        let res = mu_randomized(&f, 3, 3, 10_000, 1, 0).unwrap();
        assert_eq!(res.value, 3);
        let f8 =
            crate::product::power_basis_subspace(&f, &f.subfield_generator(3).unwrap(), 3).unwrap();
        assert_eq!(res.witness_a, f8);
    }
}
