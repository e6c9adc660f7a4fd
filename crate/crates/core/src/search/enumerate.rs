//! Enumeration of all `r`-dimensional subspaces of `F_p^n` through their RREF
//! profiles: a pivot set plus the free entries to the right of each pivot.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ExtensionField, FieldElement};
use crate::linalg::Subspace;

/// Number of `k`-dimensional subspaces of `F_q^n`, or `None` on overflow.
pub fn gaussian_binomial(q: u64, n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let q = q as u128;
    let mut acc: u128 = 1;
    // acc = C_q(n, i) after step i; each step stays integral.
    for i in 0..k {
        let num = q.checked_pow((n - i) as u32)? - 1;
        let den = q.checked_pow((i + 1) as u32)? - 1;
        acc = acc.checked_mul(num)? / den;
    }
    Some(acc)
}

/// The RREF shape of a subspace: pivot columns and the values at the free
/// (non-pivot, right-of-pivot) positions, row by row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubspaceProfile {
    pub pivots: Vec<usize>,
    pub free: Vec<u32>,
}

fn free_slots(pivots: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut is_pivot = vec![false; n];
    for &c in pivots {
        is_pivot[c] = true;
    }
    pivots
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| {
            let is_pivot = &is_pivot;
            ((c + 1)..n)
                .filter(move |&col| !is_pivot[col])
                .map(move |col| (i, col))
        })
        .collect()
}

impl SubspaceProfile {
    pub fn of(space: &Subspace) -> Self {
        let n = space.field().n();
        let pivots: Vec<usize> = space
            .basis()
            .iter()
            .map(|b| {
                b.coeffs()
                    .iter()
                    .position(|&c| c != 0)
                    .expect("nonzero row")
            })
            .collect();
        let free = free_slots(&pivots, n)
            .into_iter()
            .map(|(i, col)| space.basis()[i].coeffs()[col])
            .collect();
        SubspaceProfile { pivots, free }
    }

    pub fn to_subspace(&self, field: &Arc<ExtensionField>) -> Result<Subspace> {
        let n = field.n();
        if self.pivots.windows(2).any(|w| w[0] >= w[1]) || self.pivots.iter().any(|&c| c >= n) {
            return Err(Error::invalid("pivots must be strictly increasing columns"));
        }
        let slots = free_slots(&self.pivots, n);
        if slots.len() != self.free.len() || self.free.iter().any(|&v| v >= field.p()) {
            return Err(Error::invalid("free entries do not match the pivot set"));
        }
        let mut rows: Vec<Vec<u32>> = self
            .pivots
            .iter()
            .map(|&c| {
                let mut v = vec![0; n];
                v[c] = 1;
                v
            })
            .collect();
        for (&(i, col), &v) in slots.iter().zip(&self.free) {
            rows[i][col] = v;
        }
        Ok(Subspace::from_rref_unchecked(
            field,
            rows.into_iter().map(FieldElement::from_raw).collect(),
        ))
    }
}

/// Streams RREF bases of all `r`-subspaces of the coordinates
/// `offset..n`, optionally prefixed by the unit vector `e_0`.
///
/// With `offset = 1` and the prefix this enumerates exactly the
/// `(r+1)`-subspaces of `F_p^n` that contain `e_0`, i.e. contain `1 ∈ L`.
#[derive(Debug, Clone)]
pub(crate) struct ProfileIter {
    p: u32,
    n: usize,
    offset: usize,
    with_unit: bool,
    pivots: Vec<usize>,
    slots: Vec<(usize, usize)>,
    assign: Vec<u32>,
    done: bool,
}

impl ProfileIter {
    pub(crate) fn new(p: u32, n: usize, r: usize, offset: usize, with_unit: bool) -> Self {
        let done = offset + r > n;
        let pivots: Vec<usize> = (offset..offset + r).collect();
        let slots = if done {
            Vec::new()
        } else {
            free_slots(&pivots, n)
        };
        ProfileIter {
            p,
            n,
            offset,
            with_unit,
            assign: vec![0; slots.len()],
            pivots,
            slots,
            done,
        }
    }

    /// All `r`-subspaces, or (canonical) all `r`-subspaces containing 1.
    pub(crate) fn for_field(field: &ExtensionField, r: usize, canonical: bool) -> Self {
        if canonical {
            if r == 0 {
                // no zero subspace contains 1
                let mut it = Self::new(field.p(), field.n(), 0, 0, false);
                it.done = true;
                return it;
            }
            Self::new(field.p(), field.n(), r - 1, 1, true)
        } else {
            Self::new(field.p(), field.n(), r, 0, false)
        }
    }

    fn current(&self) -> Vec<FieldElement> {
        let mut rows = Vec::with_capacity(self.pivots.len() + 1);
        if self.with_unit {
            let mut e0 = vec![0; self.n];
            e0[0] = 1;
            rows.push(e0);
        }
        let base = rows.len();
        for &c in &self.pivots {
            let mut v = vec![0; self.n];
            v[c] = 1;
            rows.push(v);
        }
        for (&(i, col), &v) in self.slots.iter().zip(&self.assign) {
            rows[base + i][col] = v;
        }
        rows.into_iter().map(FieldElement::from_raw).collect()
    }

    fn advance(&mut self) {
        for k in (0..self.assign.len()).rev() {
            self.assign[k] += 1;
            if self.assign[k] < self.p {
                return;
            }
            self.assign[k] = 0;
        }
        // next pivot combination in lexicographic order
        let r = self.pivots.len();
        let mut i = r;
        while i > 0 {
            i -= 1;
            if self.pivots[i] < self.n - (r - i) {
                self.pivots[i] += 1;
                for j in i + 1..r {
                    self.pivots[j] = self.pivots[j - 1] + 1;
                }
                self.slots = free_slots(&self.pivots, self.n);
                self.assign = vec![0; self.slots.len()];
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for ProfileIter {
    type Item = Vec<FieldElement>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = self.current();
        self.advance();
        debug_assert!(self.offset <= self.n);
        Some(out)
    }
}

/// Every `r`-dimensional subspace exactly once, in deterministic profile order.
pub fn enumerate_subspaces(
    field: &Arc<ExtensionField>,
    r: usize,
) -> impl Iterator<Item = Subspace> + '_ {
    ProfileIter::for_field(field, r, false)
        .map(move |rows| Subspace::from_rref_unchecked(field, rows))
}

/// Every `r`-dimensional subspace containing 1.
pub fn enumerate_subspaces_containing_one(
    field: &Arc<ExtensionField>,
    r: usize,
) -> impl Iterator<Item = Subspace> + '_ {
    ProfileIter::for_field(field, r, true)
        .map(move |rows| Subspace::from_rref_unchecked(field, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// q-Pascal: C(n, k) = C(n−1, k−1) + q^k C(n−1, k).
    fn q_pascal(q: u128, n: usize, k: usize) -> u128 {
        if k == 0 {
            return 1;
        }
        if k > n {
            return 0;
        }
        q_pascal(q, n - 1, k - 1) + q.pow(k as u32) * q_pascal(q, n - 1, k)
    }

    #[test]
    fn gaussian_binomial_matches_recurrence() {
        for q in [2u64, 3, 5] {
            for n in 0..9 {
                for k in 0..=n + 1 {
                    assert_eq!(
                        gaussian_binomial(q, n, k).unwrap(),
                        q_pascal(q as u128, n, k),
                        "q={q} n={n} k={k}"
                    );
                }
            }
        }
        assert_eq!(gaussian_binomial(2, 4, 2), Some(35));
        assert_eq!(gaussian_binomial(2, 6, 3), Some(1395));
    }

    #[test]
    fn counts_and_distinctness() {
        let f = Arc::new(ExtensionField::new(2, 4).unwrap());
        assert_eq!(enumerate_subspaces(&f, 0).count(), 1);
        let all: Vec<_> = enumerate_subspaces(&f, 2).collect();
        assert_eq!(all.len(), 35);
        let distinct: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), 35);
        for s in &all {
            assert_eq!(s.dim(), 2);
            // stored rows are already canonical
            assert_eq!(&Subspace::span(&f, s.basis()).unwrap(), s);
        }
        assert_eq!(enumerate_subspaces(&f, 5).count(), 0);
    }

    #[test]
    fn containing_one_matches_filter() {
        let f = Arc::new(ExtensionField::new(3, 3).unwrap());
        for r in 0..=3 {
            let filtered: Vec<_> = enumerate_subspaces(&f, r)
                .filter(|s| s.contains(&f.one()).unwrap())
                .collect();
            let direct: Vec<_> = enumerate_subspaces_containing_one(&f, r).collect();
            assert_eq!(filtered.len(), direct.len());
            let a: HashSet<_> = filtered.into_iter().collect();
            let b: HashSet<_> = direct.into_iter().collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn profile_roundtrip() {
        let f = Arc::new(ExtensionField::new(3, 4).unwrap());
        for s in enumerate_subspaces(&f, 2) {
            let prof = SubspaceProfile::of(&s);
            assert_eq!(prof.to_subspace(&f).unwrap(), s);
        }
        let bad = SubspaceProfile {
            pivots: vec![1, 0],
            free: vec![],
        };
        assert!(bad.to_subspace(&f).is_err());
    }
}
