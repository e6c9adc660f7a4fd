//! Arithmetic in `GF(p^n)`, realized as `F_p[x]/(f)` for a monic irreducible
//! `f` of degree `n`. Elements are coordinate vectors in the power basis
//! `1, x, …, x^{n−1}`.
//!
//! Elements are ordered by their *index*: the base-`p` integer whose digit of
//! weight `p^i` is the coefficient of `x^i`. "Smallest" below always refers to
//! this order, e.g. the canonical modulus of `GF(2^4)` is `x^4 + x + 1`.

mod ntheory;
mod poly;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use ntheory::inv_mod;
pub use ntheory::{is_prime, prime_factors};

/// Largest supported characteristic.
pub const MAX_CHARACTERISTIC: u32 = 1 << 16;

/// Coordinates of a field element in the power basis.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement(Vec<u32>);

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub(crate) fn from_raw(coeffs: Vec<u32>) -> Self {
        FieldElement(coeffs)
    }

    pub(crate) fn into_raw(self) -> Vec<u32> {
        self.0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// `p^n` as given on the command line, e.g. `"2^6"` or `"7"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub n: usize,
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (p, n) = match s.split_once('^') {
            Some((p, n)) => (p.trim(), n.trim()),
            None => (s, "1"),
        };
        let p = p
            .parse::<u32>()
            .map_err(|_| Error::Parse(format!("bad characteristic in field spec {s:?}")))?;
        let n = n
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad degree in field spec {s:?}")))?;
        Ok(FieldSpec { p, n })
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.n)
    }
}

/// Parses a comma-separated coefficient list, low degree first.
pub fn parse_coefficients(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))
        })
        .collect()
}

/// The extension `F_p ⊂ F_{p^n}`.
#[derive(Clone)]
pub struct ExtensionField {
    p: u32,
    n: usize,
    /// Monic, length `n + 1`, low-to-high.
    modulus: Vec<u32>,
    primitive: FieldElement,
    /// Distinct primes dividing `p^n − 1`.
    group_order_primes: Vec<u64>,
}

impl PartialEq for ExtensionField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for ExtensionField {}

impl fmt::Debug for ExtensionField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionField")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .field("primitive", &self.primitive)
            .finish()
    }
}

fn check_size(p: u32, n: usize) -> Result<u64> {
    if !(2..=MAX_CHARACTERISTIC).contains(&p) || !is_prime(p as u64) {
        return Err(Error::invalid(format!(
            "characteristic {p} is not a prime below 2^16"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("extension degree must be positive"));
    }
    let order = u32::try_from(n)
        .ok()
        .and_then(|n| (p as u64).checked_pow(n))
        .filter(|&q| q <= 1 << 63)
        .ok_or_else(|| Error::invalid(format!("{p}^{n} exceeds 2^63")))?;
    Ok(order)
}

/// Decodes a base-`p` index into `n` coefficients, least significant first.
fn digits(mut index: u64, p: u32, n: usize) -> Vec<u32> {
    let mut out = vec![0u32; n];
    for c in out.iter_mut() {
        *c = (index % p as u64) as u32;
        index /= p as u64;
    }
    out
}

/// The smallest monic irreducible polynomial of degree `n` over `F_p`, where
/// candidates are ranked by the index of their lower `n` coefficients.
pub fn find_irreducible(p: u32, n: usize) -> Result<Vec<u32>> {
    let order = check_size(p, n)?;
    for index in 0..order {
        let mut f = digits(index, p, n);
        f.push(1);
        if poly::is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    unreachable!("every degree has an irreducible polynomial")
}

impl ExtensionField {
    /// `GF(p^n)` with the canonical modulus from [`find_irreducible`].
    pub fn new(p: u32, n: usize) -> Result<Self> {
        let modulus = find_irreducible(p, n)?;
        Self::with_modulus(p, modulus)
    }

    pub fn from_spec(spec: FieldSpec) -> Result<Self> {
        Self::new(spec.p, spec.n)
    }

    /// Uses an explicit monic modulus (low-to-high, leading 1 included).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::NotIrreducible);
        }
        let n = modulus.len() - 1;
        let order = check_size(p, n)?;
        if modulus.iter().any(|&c| c >= p) || modulus[n] != 1 {
            return Err(Error::invalid(
                "modulus must be monic with residues in [0, p)",
            ));
        }
        if !poly::is_irreducible(&modulus, p) {
            return Err(Error::NotIrreducible);
        }
        let mut field = ExtensionField {
            p,
            n,
            modulus,
            primitive: FieldElement(vec![0; n]),
            group_order_primes: prime_factors(order - 1),
        };
        field.primitive = field.find_primitive();
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p^n`.
    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.n as u32)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive(&self) -> &FieldElement {
        &self.primitive
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            n: self.n,
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(vec![0; self.n])
    }

    pub fn one(&self) -> FieldElement {
        self.scalar(1)
    }

    /// The residue class of `x`.
    pub fn x(&self) -> FieldElement {
        if self.n == 1 {
            // x ≡ −f_0 modulo x + f_0
            self.scalar(self.p - self.modulus[0])
        } else {
            let mut c = vec![0; self.n];
            c[1] = 1;
            FieldElement(c)
        }
    }

    /// The image of an integer in the prime field.
    pub fn scalar(&self, c: u32) -> FieldElement {
        let mut v = vec![0; self.n];
        v[0] = c % self.p;
        FieldElement(v)
    }

    /// Validates a coordinate vector.
    pub fn element(&self, coeffs: Vec<u32>) -> Result<FieldElement> {
        if coeffs.len() != self.n {
            return Err(Error::invalid(format!(
                "element has {} coordinates, field degree is {}",
                coeffs.len(),
                self.n
            )));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::invalid(format!(
                "coefficient {c} not reduced mod {}",
                self.p
            )));
        }
        Ok(FieldElement(coeffs))
    }

    pub fn element_from_index(&self, index: u64) -> FieldElement {
        FieldElement(digits(index, self.p, self.n))
    }

    pub fn index_of(&self, a: &FieldElement) -> u64 {
        a.0.iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    pub fn contains(&self, a: &FieldElement) -> bool {
        a.0.len() == self.n && a.0.iter().all(|&c| c < self.p)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| {
                    let s = x + y;
                    if s >= p {
                        s - p
                    } else {
                        s
                    }
                })
                .collect(),
        )
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement(
            a.0.iter()
                .map(|&x| if x == 0 { 0 } else { self.p - x })
                .collect(),
        )
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    /// Multiplication by a prime-field scalar.
    pub fn scale(&self, c: u32, a: &FieldElement) -> FieldElement {
        let p = self.p as u64;
        let c = c as u64 % p;
        FieldElement(a.0.iter().map(|&x| (x as u64 * c % p) as u32).collect())
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let n = self.n;
        let p = self.p as u64;
        // n ≤ 63 and coefficients < 2^16 keep every partial sum below 2^38.
        let mut t = vec![0u64; 2 * n - 1];
        for (i, &ai) in a.0.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.0.iter().enumerate() {
                t[i + j] += ai as u64 * bj as u64;
            }
        }
        for k in (n..2 * n - 1).rev() {
            let c = t[k] % p;
            if c == 0 {
                continue;
            }
            let neg = p - c;
            for (j, &mj) in self.modulus[..n].iter().enumerate() {
                t[k - n + j] = (t[k - n + j] + neg * mj as u64) % p;
            }
        }
        FieldElement(t[..n].iter().map(|&c| (c % p) as u32).collect())
    }

    pub fn pow(&self, a: &FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.order() - 2))
    }

    /// `a^{p^k}`.
    pub fn frobenius(&self, a: &FieldElement, k: usize) -> FieldElement {
        (0..k).fold(a.clone(), |acc, _| self.pow(&acc, self.p as u64))
    }

    /// Whether `a` generates the multiplicative group.
    pub fn is_primitive(&self, a: &FieldElement) -> bool {
        if a.is_zero() {
            return false;
        }
        let q1 = self.order() - 1;
        let one = self.one();
        self.group_order_primes
            .iter()
            .all(|&l| self.pow(a, q1 / l) != one)
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: &FieldElement) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let one = self.one();
        let mut ord = self.order() - 1;
        for &l in &self.group_order_primes {
            while ord.is_multiple_of(l) && self.pow(a, ord / l) == one {
                ord /= l;
            }
        }
        Ok(ord)
    }

    /// The smallest generator of the multiplicative group.
    pub fn find_primitive(&self) -> FieldElement {
        (1..self.order())
            .map(|i| self.element_from_index(i))
            .find(|a| self.is_primitive(a))
            .expect("the multiplicative group of a finite field is cyclic")
    }

    /// Degree of `a` over the subfield `F_{p^m}` (`m | n`): the least `k` with
    /// `a^{p^{mk}} = a`.
    pub fn degree_over_subfield(&self, a: &FieldElement, m: usize) -> Result<usize> {
        if m == 0 || !self.n.is_multiple_of(m) {
            return Err(Error::invalid(format!("{m} does not divide {}", self.n)));
        }
        let mut cur = a.clone();
        for k in 1..=self.n / m {
            cur = self.frobenius(&cur, m);
            if &cur == a {
                return Ok(k);
            }
        }
        unreachable!("a^(p^n) = a in GF(p^n)")
    }

    /// Degree of `a` over the prime field.
    pub fn degree(&self, a: &FieldElement) -> usize {
        self.degree_over_subfield(a, 1).expect("1 divides n")
    }

    /// A generator of the subfield `F_{p^d}`: `primitive^{(p^n−1)/(p^d−1)}`.
    pub fn subfield_generator(&self, d: usize) -> Result<FieldElement> {
        if d == 0 || !self.n.is_multiple_of(d) {
            return Err(Error::invalid(format!(
                "{d} does not divide the degree {}",
                self.n
            )));
        }
        let sub_order = (self.p as u64).pow(d as u32);
        Ok(self.pow(&self.primitive, (self.order() - 1) / (sub_order - 1)))
    }
}
