//! Product spans `⟨AB⟩`, their stabilizer subfields, the linear Kneser
//! inequality, and explicit pairs realizing small products.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ExtensionField, FieldElement};
use crate::kappa::{self, KappaResult};
use crate::linalg::{Echelon, Subspace};

fn require_nonzero(spaces: &[&Subspace]) -> Result<()> {
    if spaces.iter().any(|s| s.is_zero()) {
        Err(Error::ZeroSubspace)
    } else {
        Ok(())
    }
}

fn require_same_field(a: &Subspace, b: &Subspace) -> Result<()> {
    if Arc::ptr_eq(a.field(), b.field()) || a.field() == b.field() {
        Ok(())
    } else {
        Err(Error::FieldMismatch)
    }
}

/// Dimension of `span{a_i b_j}` for raw basis lists. Stops early once the
/// whole field is reached.
pub(crate) fn product_dim(field: &ExtensionField, a: &[FieldElement], b: &[FieldElement]) -> usize {
    let mut ech = Echelon::new(field.p(), field.n());
    for x in a {
        for y in b {
            ech.insert(field.mul(x, y).into_raw());
            if ech.is_full() {
                return ech.rank();
            }
        }
    }
    ech.rank()
}

/// `⟨AB⟩`: the span of all products of basis vectors.
pub fn product_span(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    require_nonzero(&[a, b])?;
    require_same_field(a, b)?;
    let field = a.field();
    let mut ech = Echelon::new(field.p(), field.n());
    'outer: for x in a.basis() {
        for y in b.basis() {
            ech.insert(field.mul(x, y).into_raw());
            if ech.is_full() {
                break 'outer;
            }
        }
    }
    Ok(Subspace::from_echelon(field, ech))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerReport {
    /// `H = {x ∈ L : xV ⊆ V}`.
    pub h: Subspace,
    /// `dim H`.
    pub g: usize,
    /// 1 ∈ H, H closed under products, dim H | n, and H·V = V.
    pub is_subfield_verified: bool,
}

/// The stabilizer of `V`, computed as the common kernel of the linear maps
/// `x ↦ remainder(x·v_i)` over the basis `v_i` of `V`.
pub fn stabilizer(v: &Subspace) -> Result<StabilizerReport> {
    require_nonzero(&[v])?;
    let field = v.field();
    let n = field.n();
    let ech_v = v.echelon();
    let powers: Vec<FieldElement> = {
        let x = field.x();
        let mut out = Vec::with_capacity(n);
        let mut cur = field.one();
        for _ in 0..n {
            out.push(cur.clone());
            cur = field.mul(&cur, &x);
        }
        out
    };

    // Equation (v_i, t): sum_j remainder(x^j v_i)[t] * x_j = 0 for each
    // non-pivot column t of V.
    let mut non_pivot = vec![true; n];
    for &c in ech_v.pivots() {
        non_pivot[c] = false;
    }
    let mut equations = Echelon::new(field.p(), n);
    for vi in v.basis() {
        let images: Vec<Vec<u32>> = powers
            .iter()
            .map(|xj| {
                let mut w = field.mul(xj, vi).into_raw();
                ech_v.reduce(&mut w);
                w
            })
            .collect();
        for t in (0..n).filter(|&t| non_pivot[t]) {
            let row: Vec<u32> = images.iter().map(|img| img[t]).collect();
            equations.insert(row);
            if equations.is_full() {
                break;
            }
        }
    }
    let kernel: Vec<FieldElement> = equations
        .kernel()
        .into_iter()
        .map(FieldElement::from_raw)
        .collect();
    let h = Subspace::span(field, &kernel)?;
    let is_subfield_verified = verify_subfield(&h)? && product_span(&h, v)? == *v;
    Ok(StabilizerReport {
        g: h.dim(),
        h,
        is_subfield_verified,
    })
}

/// 1 ∈ H, basis products stay in H, and dim H divides n.
pub fn verify_subfield(h: &Subspace) -> Result<bool> {
    let field = h.field();
    if h.is_zero() || !h.contains(&field.one())? || !field.n().is_multiple_of(h.dim()) {
        return Ok(false);
    }
    for x in h.basis() {
        for y in h.basis() {
            if !h.contains(&field.mul(x, y))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KneserReport {
    pub dim_a: usize,
    pub dim_b: usize,
    pub dim_ab: usize,
    pub dim_h: usize,
    /// `dim⟨AB⟩ − (dim A + dim B − dim H)`.
    pub slack: i64,
    pub holds: bool,
    pub stabilizer_is_subfield: bool,
}

/// Checks `dim⟨AB⟩ ≥ dim A + dim B − dim H` with `H` the stabilizer of `⟨AB⟩`.
pub fn kneser_check(a: &Subspace, b: &Subspace) -> Result<KneserReport> {
    let ab = product_span(a, b)?;
    let stab = stabilizer(&ab)?;
    let slack = ab.dim() as i64 - (a.dim() as i64 + b.dim() as i64 - stab.g as i64);
    Ok(KneserReport {
        dim_a: a.dim(),
        dim_b: b.dim(),
        dim_ab: ab.dim(),
        dim_h: stab.g,
        slack,
        holds: slack >= 0,
        stabilizer_is_subfield: stab.is_subfield_verified,
    })
}

/// Slack distribution of [`kneser_check`] over seeded random pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KneserSurvey {
    pub pairs: u64,
    pub violations: u64,
    /// Stabilizers that failed the subfield verification.
    pub stabilizer_failures: u64,
    pub slack_histogram: BTreeMap<i64, u64>,
    /// Smallest pair index with a violation or stabilizer failure.
    pub first_failure: Option<u64>,
}

/// Runs [`kneser_check`] on `pairs` random pairs. Dimensions are fixed when
/// given, otherwise uniform in `[1, n]` per pair. Pair `i` draws from its own
/// seeded stream, so the survey does not depend on `workers`.
pub fn kneser_survey(
    field: &Arc<ExtensionField>,
    r: Option<usize>,
    s: Option<usize>,
    pairs: u64,
    seed: u64,
    workers: usize,
) -> Result<KneserSurvey> {
    let n = field.n();
    for d in [r, s].into_iter().flatten() {
        if d == 0 || d > n {
            return Err(Error::invalid(format!(
                "dimension {d} must lie in [1, {n}]"
            )));
        }
    }
    let reports: Vec<KneserReport> = crate::search::pool(workers)?.install(|| {
        (0..pairs)
            .into_par_iter()
            .map(|i| {
                let mut rng = crate::search::trial_rng(seed, i);
                let r = r.unwrap_or_else(|| rng.gen_range(1..=n));
                let s = s.unwrap_or_else(|| rng.gen_range(1..=n));
                let a = Subspace::random(field, r, &mut rng)?;
                let b = Subspace::random(field, s, &mut rng)?;
                kneser_check(&a, &b)
            })
            .collect::<Result<_>>()
    })?;
    let mut survey = KneserSurvey {
        pairs,
        violations: 0,
        stabilizer_failures: 0,
        slack_histogram: BTreeMap::new(),
        first_failure: None,
    };
    for (i, rep) in reports.iter().enumerate() {
        *survey.slack_histogram.entry(rep.slack).or_default() += 1;
        if !rep.holds {
            survey.violations += 1;
        }
        if !rep.stabilizer_is_subfield {
            survey.stabilizer_failures += 1;
        }
        if (!rep.holds || !rep.stabilizer_is_subfield) && survey.first_failure.is_none() {
            survey.first_failure = Some(i as u64);
        }
    }
    Ok(survey)
}

/// `⟨1, α, …, α^{r−1}⟩`; requires `r ≤ deg α`.
pub fn power_basis_subspace(
    field: &Arc<ExtensionField>,
    alpha: &FieldElement,
    r: usize,
) -> Result<Subspace> {
    if !field.contains(alpha) {
        return Err(Error::FieldMismatch);
    }
    if r == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let deg = field.degree(alpha);
    if r > deg {
        return Err(Error::invalid(format!(
            "{r} powers of an element of degree {deg} are linearly dependent"
        )));
    }
    let mut powers = Vec::with_capacity(r);
    let mut cur = field.one();
    for _ in 0..r {
        powers.push(cur.clone());
        cur = field.mul(&cur, alpha);
    }
    Subspace::span(field, &powers)
}

/// Keeps 1 and then RREF rows of `space` in order until the dimension is `r`.
fn trim_keeping_one(space: &Subspace, r: usize) -> Result<Subspace> {
    let field = space.field();
    let mut ech = Echelon::new(field.p(), field.n());
    ech.insert(field.one().into_raw());
    for b in space.basis() {
        if ech.rank() == r {
            break;
        }
        ech.insert(b.coeffs().to_vec());
    }
    debug_assert_eq!(ech.rank(), r);
    Ok(Subspace::from_echelon(field, ech))
}

/// The `F_p`-span of `{γ^i β^j : 0 ≤ i < h, 0 ≤ j < count}` where `γ`
/// generates `F_{p^h}`: the `F_{p^h}`-span of `1, β, …, β^{count−1}`.
fn subfield_power_span(
    field: &Arc<ExtensionField>,
    gamma: &FieldElement,
    h: usize,
    beta: &FieldElement,
    count: usize,
) -> Result<Subspace> {
    let mut gens = Vec::with_capacity(h * count);
    let mut bj = field.one();
    for _ in 0..count {
        let mut gi = field.one();
        for _ in 0..h {
            gens.push(field.mul(&gi, &bj));
            gi = field.mul(&gi, gamma);
        }
        bj = field.mul(&bj, beta);
    }
    Subspace::span(field, &gens)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalPair {
    pub a: Subspace,
    pub b: Subspace,
    pub certificate: KappaResult,
}

/// A pair with `dim A = r`, `dim B = s` and `dim⟨AB⟩ ≤ κ(r, s)` built over
/// the intermediate field of degree `h0`.
pub fn optimal_pair(field: &Arc<ExtensionField>, r: usize, s: usize) -> Result<OptimalPair> {
    let n = field.n();
    if r == 0 || s == 0 || r > n || s > n {
        return Err(Error::invalid(format!(
            "r = {r}, s = {s} must lie in [1, {n}]"
        )));
    }
    let degrees = kappa::divisors(n as u64)?;
    let cert = kappa::kappa_of(r as u64, s as u64, &degrees)?;
    let h0 = cert.h0 as usize;
    let gamma = field.subfield_generator(h0)?;
    let beta = field.primitive().clone();
    let a0 = subfield_power_span(field, &gamma, h0, &beta, cert.r0 as usize)?;
    let b0 = subfield_power_span(field, &gamma, h0, &beta, cert.s0 as usize)?;
    debug_assert_eq!(a0.dim(), h0 * cert.r0 as usize);
    Ok(OptimalPair {
        a: trim_keeping_one(&a0, r)?,
        b: trim_keeping_one(&b0, s)?,
        certificate: cert,
    })
}

/// Per-instance evidence that a pair is optimal: the upper bound is the
/// measured dimension, the lower bound comes from the stabilizer `H` of
/// `⟨AB⟩` via Kneser applied to `⟨HA⟩, ⟨HB⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionCertificate {
    pub r: usize,
    pub s: usize,
    pub dim_ab: usize,
    pub kappa: u64,
    pub stabilizer_dim: usize,
    /// `(⌈r/g⌉ + ⌈s/g⌉ − 1)·g` with `g = dim H`.
    pub lower_bound: u64,
    pub kneser: KneserReport,
    /// Kneser on the enlarged pair `⟨HA⟩, ⟨HB⟩`.
    pub enlarged_kneser: KneserReport,
    pub optimal: bool,
}

pub fn certify_pair(a: &Subspace, b: &Subspace) -> Result<ConstructionCertificate> {
    let field = a.field();
    let ab = product_span(a, b)?;
    let stab = stabilizer(&ab)?;
    let ha = product_span(&stab.h, a)?;
    let hb = product_span(&stab.h, b)?;
    let enlarged = kneser_check(&ha, &hb)?;
    let kneser = kneser_check(a, b)?;
    let kappa = kappa::kappa_of(
        a.dim() as u64,
        b.dim() as u64,
        &kappa::divisors(field.n() as u64)?,
    )?
    .value;
    let lower_bound = kappa::f_h(a.dim() as u64, b.dim() as u64, stab.g as u64)?;
    let optimal = ab.dim() as u64 == kappa
        && lower_bound >= kappa
        && ab.dim() as u64 >= lower_bound
        && product_span(&ha, &hb)? == ab
        && enlarged.holds
        && kneser.holds
        && stab.is_subfield_verified;
    Ok(ConstructionCertificate {
        r: a.dim(),
        s: b.dim(),
        dim_ab: ab.dim(),
        kappa,
        stabilizer_dim: stab.g,
        lower_bound,
        kneser,
        enlarged_kneser: enlarged,
        optimal,
    })
}

/// One step `M ⊂ M(α)` of a tower inside the ambient field: `M = F_{p^m}`,
/// `[M(α) : M] = d`, and `r = q1·m + r0`, `s = q2·m + s0` with
/// `1 ≤ r0, s0 ≤ m`, `q1, q2 ≤ d − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerSpec {
    pub field: Arc<ExtensionField>,
    pub m: usize,
    pub d: usize,
    pub alpha: FieldElement,
    pub q1: usize,
    pub q2: usize,
    pub r0: usize,
    pub s0: usize,
}

fn split_dimension(r: usize, m: usize) -> (usize, usize) {
    let r0 = (r - 1) % m + 1;
    ((r - r0) / m, r0)
}

impl TowerSpec {
    /// Splits `r`, `s` against `M = F_{p^m}` and takes `α` generating
    /// `F_{p^{md}}`, which has degree `d` over `M`.
    pub fn new(
        field: &Arc<ExtensionField>,
        m: usize,
        d: usize,
        r: usize,
        s: usize,
    ) -> Result<Self> {
        let top = m
            .checked_mul(d)
            .filter(|&t| m > 0 && d > 0 && field.n().is_multiple_of(t))
            .ok_or_else(|| Error::invalid(format!("m·d = {m}·{d} must divide {}", field.n())))?;
        if r == 0 || s == 0 || r > top || s > top {
            return Err(Error::invalid(format!(
                "r = {r}, s = {s} must lie in [1, {top}]"
            )));
        }
        let alpha = field.subfield_generator(top)?;
        let (q1, r0) = split_dimension(r, m);
        let (q2, s0) = split_dimension(s, m);
        let spec = TowerSpec {
            field: Arc::clone(field),
            m,
            d,
            alpha,
            q1,
            q2,
            r0,
            s0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::invalid(msg));
        if self.m == 0 || self.d == 0 || !self.field.n().is_multiple_of(self.m * self.d) {
            return bad(format!(
                "m·d = {}·{} must divide {}",
                self.m,
                self.d,
                self.field.n()
            ));
        }
        if !(1..=self.m).contains(&self.r0) || !(1..=self.m).contains(&self.s0) {
            return bad("remainders must lie in [1, m]".into());
        }
        if self.q1 >= self.d || self.q2 >= self.d {
            return bad("quotients must not exceed d − 1".into());
        }
        if self.field.degree_over_subfield(&self.alpha, self.m)? != self.d {
            return bad(format!(
                "alpha must have degree {} over F_p^{}",
                self.d, self.m
            ));
        }
        Ok(())
    }

    pub fn r(&self) -> usize {
        self.q1 * self.m + self.r0
    }

    pub fn s(&self) -> usize {
        self.q2 * self.m + self.s0
    }
}

/// `A = M·{1, α, …, α^{q1−1}} ⊕ A0·α^{q1}`, likewise `B`.
pub fn tower_construction(
    spec: &TowerSpec,
    a0: &Subspace,
    b0: &Subspace,
) -> Result<(Subspace, Subspace)> {
    spec.validate()?;
    let field = &spec.field;
    require_nonzero(&[a0, b0])?;
    if a0.dim() != spec.r0 || b0.dim() != spec.s0 {
        return Err(Error::invalid(format!(
            "base pair has dimensions ({}, {}), spec expects ({}, {})",
            a0.dim(),
            b0.dim(),
            spec.r0,
            spec.s0
        )));
    }
    let gamma = field.subfield_generator(spec.m)?;
    let m_space = subfield_power_span(field, &gamma, spec.m, &field.one(), 1)?;
    for base in [a0, b0] {
        require_same_field(base, &m_space)?;
        if !base.is_subspace_of(&m_space)? {
            return Err(Error::invalid("base subspace is not contained in M"));
        }
    }
    let extend = |base: &Subspace, q: usize| -> Result<Subspace> {
        if q == 0 {
            return Ok(base.clone());
        }
        let head = subfield_power_span(field, &gamma, spec.m, &spec.alpha, q)?;
        let tail = base.scaled(&field.pow(&spec.alpha, q as u64))?;
        head.sum(&tail)
    };
    Ok((extend(a0, spec.q1)?, extend(b0, spec.q2)?))
}

/// Builds a pair with `dim⟨AB⟩ ≤ r + s − 1` inside `F_{p^top}` by climbing
/// the chain of subfield degrees `1 = chain[0] | chain[1] | … | chain[last]`.
/// Each step applies [`tower_construction`] to the pair found one level down.
pub fn small_products_pair(
    field: &Arc<ExtensionField>,
    chain: &[usize],
    r: usize,
    s: usize,
) -> Result<(Subspace, Subspace)> {
    if chain.first() != Some(&1)
        || chain
            .windows(2)
            .any(|w| w[0] == 0 || w[1] % w[0] != 0 || w[1] == w[0])
    {
        return Err(Error::invalid(
            "chain must start at 1 and strictly increase by divisibility",
        ));
    }
    let top = *chain.last().expect("non-empty");
    if !field.n().is_multiple_of(top) {
        return Err(Error::invalid(format!(
            "{top} does not divide {}",
            field.n()
        )));
    }
    if r == 0 || s == 0 || r > top || s > top {
        return Err(Error::invalid(format!(
            "r = {r}, s = {s} must lie in [1, {top}]"
        )));
    }
    if chain.len() == 1 {
        let one = Subspace::span(field, &[field.one()])?;
        return Ok((one.clone(), one));
    }
    let m = chain[chain.len() - 2];
    let spec = TowerSpec::new(field, m, top / m, r, s)?;
    let (a0, b0) = small_products_pair(field, &chain[..chain.len() - 1], spec.r0, spec.s0)?;
    tower_construction(&spec, &a0, &b0)
}
