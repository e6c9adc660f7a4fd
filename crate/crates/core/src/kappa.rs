//! The κ function: `min_h (⌈r/h⌉ + ⌈s/h⌉ − 1)·h` over a set of admissible
//! intermediate degrees, together with its per-`h` terms and full tables.
//!
//! Everything here is exact integer arithmetic with overflow checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `r`, `s` or `n` accepted by the numeric routines.
pub const MAX_ARG: u64 = 1 << 31;

/// Degrees of the finite-dimensional intermediate fields of an extension
/// (or orders of the finite subgroups of a group).
///
/// `n == 0` is the sentinel for an extension of infinite degree; the
/// divisibility invariant is only enforced when `n` is finite.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdmissibleDegreeSet {
    n: u64,
    degrees: Vec<u64>,
}

impl AdmissibleDegreeSet {
    /// Validates and normalizes (sorts, dedups) the given degrees.
    pub fn new(n: u64, mut degrees: Vec<u64>) -> Result<Self> {
        if n > MAX_ARG {
            return Err(Error::invalid(format!("degree {n} exceeds 2^31")));
        }
        degrees.sort_unstable();
        degrees.dedup();
        if degrees.first() != Some(&1) {
            return Err(Error::invalid("admissible degrees must contain 1"));
        }
        if let Some(&h) = degrees.iter().find(|&&h| h > MAX_ARG) {
            return Err(Error::invalid(format!("degree {h} exceeds 2^31")));
        }
        if n != 0 {
            if let Some(&h) = degrees.iter().find(|&&h| !n.is_multiple_of(h)) {
                return Err(Error::invalid(format!("degree {h} does not divide {n}")));
            }
        }
        Ok(Self { n, degrees })
    }

    /// Only the base field: the degree set of a purely transcendental extension.
    pub fn trivial() -> Self {
        Self {
            n: 0,
            degrees: vec![1],
        }
    }

    /// Ambient degree, `0` when infinite.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn is_finite(&self) -> bool {
        self.n != 0
    }
}

/// A validated κ evaluation request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaQuery {
    pub r: u64,
    pub s: u64,
    pub degrees: AdmissibleDegreeSet,
}

impl KappaQuery {
    pub fn new(r: u64, s: u64, degrees: AdmissibleDegreeSet) -> Result<Self> {
        check_positive("r", r)?;
        check_positive("s", s)?;
        if degrees.is_finite() && (r > degrees.n() || s > degrees.n()) {
            return Err(Error::invalid(format!(
                "r = {r}, s = {s} must not exceed the degree {}",
                degrees.n()
            )));
        }
        Ok(Self { r, s, degrees })
    }
}

/// The minimum value together with the smallest degree attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KappaResult {
    pub value: u64,
    pub h0: u64,
    pub r0: u64,
    pub s0: u64,
}

fn check_positive(name: &str, v: u64) -> Result<()> {
    if v == 0 {
        return Err(Error::invalid(format!("{name} must be positive")));
    }
    if v > MAX_ARG {
        return Err(Error::invalid(format!("{name} = {v} exceeds 2^31")));
    }
    Ok(())
}

/// `(⌈r/h⌉ + ⌈s/h⌉ − 1)·h`.
pub fn f_h(r: u64, s: u64, h: u64) -> Result<u64> {
    check_positive("r", r)?;
    check_positive("s", s)?;
    check_positive("h", h)?;
    (r.div_ceil(h) + s.div_ceil(h) - 1)
        .checked_mul(h)
        .ok_or(Error::Overflow)
}

/// Evaluates κ for a validated query. Ties are broken towards the smallest `h`.
pub fn kappa(q: &KappaQuery) -> Result<KappaResult> {
    let mut best: Option<KappaResult> = None;
    for &h in q.degrees.degrees() {
        let value = f_h(q.r, q.s, h)?;
        if best.is_none_or(|b| value < b.value) {
            best = Some(KappaResult {
                value,
                h0: h,
                r0: q.r.div_ceil(h),
                s0: q.s.div_ceil(h),
            });
        }
    }
    best.ok_or_else(|| Error::invalid("empty degree set"))
}

/// Convenience wrapper building the query in place.
pub fn kappa_of(r: u64, s: u64, degrees: &AdmissibleDegreeSet) -> Result<KappaResult> {
    kappa(&KappaQuery::new(r, s, degrees.clone())?)
}

/// Every `(h, f_h(r, s))` term in ascending `h`.
pub fn kappa_breakdown(q: &KappaQuery) -> Result<Vec<(u64, u64)>> {
    q.degrees
        .degrees()
        .iter()
        .map(|&h| Ok((h, f_h(q.r, q.s, h)?)))
        .collect()
}

/// The `n × n` matrix of κ values; row `r − 1`, column `s − 1`.
pub fn kappa_table(n: u64, degrees: &AdmissibleDegreeSet) -> Result<Vec<Vec<u64>>> {
    if degrees.n() != n {
        return Err(Error::invalid(format!(
            "degree set is for n = {}, table requested for n = {n}",
            degrees.n()
        )));
    }
    check_positive("n", n)?;
    (1..=n)
        .map(|r| {
            (1..=n)
                .map(|s| kappa_of(r, s, degrees).map(|k| k.value))
                .collect()
        })
        .collect()
}

/// All divisors of `n`: the intermediate degrees of `F_p ⊂ F_{p^n}`.
pub fn divisors(n: u64) -> Result<AdmissibleDegreeSet> {
    check_positive("n", n)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    AdmissibleDegreeSet::new(n, small)
}
