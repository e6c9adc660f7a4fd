//! `F_p`-subspaces of `GF(p^n)` in reduced row echelon form.
//!
//! RREF (pivots ascending by power-basis index) is the canonical form, so two
//! subspaces are equal exactly when their basis matrices are identical.

use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{inv_mod, ExtensionField, FieldElement};

/// Incremental Gauss–Jordan elimination over `F_p` keeping rows in RREF.
#[derive(Debug, Clone)]
pub(crate) struct Echelon {
    p: u32,
    width: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub(crate) fn new(p: u32, width: usize) -> Self {
        Echelon {
            p,
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }

    /// Clears `v` at every pivot column; the remainder is zero iff `v` is in
    /// the row space.
    pub(crate) fn reduce(&self, v: &mut [u32]) {
        let p = self.p as u64;
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = v[c] as u64;
            if f == 0 {
                continue;
            }
            let neg = p - f;
            for (x, &y) in v.iter_mut().zip(row) {
                if y != 0 {
                    *x = ((*x as u64 + neg * y as u64) % p) as u32;
                }
            }
        }
    }

    /// Adds `v` to the row space; returns whether the rank grew.
    pub(crate) fn insert(&mut self, mut v: Vec<u32>) -> bool {
        debug_assert_eq!(v.len(), self.width);
        self.reduce(&mut v);
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let p = self.p as u64;
        let inv = inv_mod(v[c], self.p) as u64;
        for x in v.iter_mut() {
            *x = (*x as u64 * inv % p) as u32;
        }
        for row in self.rows.iter_mut() {
            let f = row[c] as u64;
            if f == 0 {
                continue;
            }
            let neg = p - f;
            for (x, &y) in row.iter_mut().zip(&v) {
                if y != 0 {
                    *x = ((*x as u64 + neg * y as u64) % p) as u32;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < c);
        self.pivots.insert(at, c);
        self.rows.insert(at, v);
        true
    }

    pub(crate) fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub(crate) fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub(crate) fn into_rows(self) -> Vec<Vec<u32>> {
        self.rows
    }

    /// Basis of `{x : M x = 0}` where the rows inserted so far are the
    /// equations of `M`.
    pub(crate) fn kernel(&self) -> Vec<Vec<u32>> {
        let p = self.p;
        let mut is_pivot = vec![false; self.width];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.width)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = vec![0u32; self.width];
                x[f] = 1;
                for (row, &c) in self.rows.iter().zip(&self.pivots) {
                    x[c] = (p - row[f]) % p;
                }
                x
            })
            .collect()
    }
}

/// An `F_p`-subspace of `GF(p^n)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    field: Arc<ExtensionField>,
    basis: Vec<FieldElement>,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Subspace")
            .field("field", &self.field.spec())
            .field("basis", &self.basis)
            .finish()
    }
}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.p().hash(state);
        self.field.modulus().hash(state);
        self.basis.hash(state);
    }
}

impl Subspace {
    pub(crate) fn from_echelon(field: &Arc<ExtensionField>, ech: Echelon) -> Self {
        Subspace {
            field: Arc::clone(field),
            basis: ech
                .into_rows()
                .into_iter()
                .map(FieldElement::from_raw)
                .collect(),
        }
    }

    /// RREF of the row space spanned by `vectors`.
    pub fn span<'a, I>(field: &Arc<ExtensionField>, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a FieldElement>,
    {
        let mut ech = Echelon::new(field.p(), field.n());
        for v in vectors {
            if !field.contains(v) {
                return Err(Error::FieldMismatch);
            }
            if !ech.is_full() {
                ech.insert(v.coeffs().to_vec());
            }
        }
        Ok(Self::from_echelon(field, ech))
    }

    /// Builds a subspace from rows already known to be in RREF.
    pub(crate) fn from_rref_unchecked(
        field: &Arc<ExtensionField>,
        basis: Vec<FieldElement>,
    ) -> Self {
        Subspace {
            field: Arc::clone(field),
            basis,
        }
    }

    pub fn zero(field: &Arc<ExtensionField>) -> Self {
        Subspace {
            field: Arc::clone(field),
            basis: Vec::new(),
        }
    }

    /// The whole field `L`.
    pub fn whole(field: &Arc<ExtensionField>) -> Self {
        let basis = (0..field.n())
            .map(|i| {
                let mut c = vec![0; field.n()];
                c[i] = 1;
                FieldElement::from_raw(c)
            })
            .collect();
        Subspace {
            field: Arc::clone(field),
            basis,
        }
    }

    pub fn field(&self) -> &Arc<ExtensionField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Basis rows in RREF.
    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    pub(crate) fn echelon(&self) -> Echelon {
        let mut ech = Echelon::new(self.field.p(), self.field.n());
        for b in &self.basis {
            ech.insert(b.coeffs().to_vec());
        }
        ech
    }

    fn check_same_field(&self, other: &Subspace) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Remainder of `v` after clearing the pivot columns.
    pub fn reduce(&self, v: &FieldElement) -> Result<FieldElement> {
        if !self.field.contains(v) {
            return Err(Error::FieldMismatch);
        }
        let mut w = v.coeffs().to_vec();
        self.echelon().reduce(&mut w);
        Ok(FieldElement::from_raw(w))
    }

    pub fn contains(&self, v: &FieldElement) -> Result<bool> {
        Ok(self.reduce(v)?.is_zero())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_same_field(other)?;
        let ech = other.echelon();
        Ok(self.basis.iter().all(|b| {
            let mut w = b.coeffs().to_vec();
            ech.reduce(&mut w);
            w.iter().all(|&c| c == 0)
        }))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_field(other)?;
        Subspace::span(&self.field, self.basis.iter().chain(&other.basis))
    }

    /// Zassenhaus: row-reduce `[u | u]` over `U` stacked on `[v | 0]` over `V`;
    /// the rows whose left half vanishes carry a basis of `U ∩ V` on the right.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_field(other)?;
        let n = self.field.n();
        let mut ech = Echelon::new(self.field.p(), 2 * n);
        for u in &self.basis {
            let mut row = u.coeffs().to_vec();
            row.extend_from_slice(u.coeffs());
            ech.insert(row);
        }
        for v in &other.basis {
            let mut row = v.coeffs().to_vec();
            row.extend(std::iter::repeat_n(0, n));
            ech.insert(row);
        }
        let right: Vec<FieldElement> = ech
            .rows()
            .iter()
            .zip(ech.pivots())
            .filter(|(_, &c)| c >= n)
            .map(|(row, _)| FieldElement::from_raw(row[n..].to_vec()))
            .collect();
        Subspace::span(&self.field, &right)
    }

    /// Canonical-form identity.
    pub fn equal(&self, other: &Subspace) -> Result<bool> {
        self.check_same_field(other)?;
        Ok(self.basis == other.basis)
    }

    /// `c·U` for a field element `c`.
    pub fn scaled(&self, c: &FieldElement) -> Result<Subspace> {
        if !self.field.contains(c) {
            return Err(Error::FieldMismatch);
        }
        let images: Vec<_> = self.basis.iter().map(|b| self.field.mul(c, b)).collect();
        Subspace::span(&self.field, &images)
    }

    /// A uniformly distributed `dim`-dimensional subspace.
    pub fn random<R: Rng>(
        field: &Arc<ExtensionField>,
        dim: usize,
        rng: &mut R,
    ) -> Result<Subspace> {
        if dim > field.n() {
            return Err(Error::invalid(format!(
                "dimension {dim} exceeds {}",
                field.n()
            )));
        }
        let mut ech = Echelon::new(field.p(), field.n());
        while ech.rank() < dim {
            let v = field.element_from_index(rng.gen_range(0..field.order()));
            ech.insert(v.into_raw());
        }
        Ok(Self::from_echelon(field, ech))
    }

    /// One basis row per line, coordinates comma-separated low to high.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.basis {
            let line: Vec<String> = b.coeffs().iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    /// Parses [`Subspace::to_text`] output. Rows need not be reduced; blank
    /// lines and lines starting with `#` are skipped.
    pub fn from_text(field: &Arc<ExtensionField>, text: &str) -> Result<Subspace> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at_line = |e: Error| {
                let msg = match e {
                    Error::Parse(m) | Error::InvalidArgument(m) => m,
                    other => other.to_string(),
                };
                Error::Parse(format!("line {}: {msg}", lineno + 1))
            };
            let coeffs = crate::field::parse_coefficients(line).map_err(at_line)?;
            let v = field.element(coeffs).map_err(at_line)?;
            rows.push(v);
        }
        Subspace::span(field, &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32, n: usize) -> Arc<ExtensionField> {
        Arc::new(ExtensionField::new(p, n).unwrap())
    }

    fn subfield_span(f: &Arc<ExtensionField>, d: usize) -> Subspace {
        let g = f.subfield_generator(d).unwrap();
        let powers: Vec<_> = (0..d as u64).map(|i| f.pow(&g, i)).collect();
        Subspace::span(f, &powers).unwrap()
    }

    #[test]
    fn span_of_multiples() {
        let f = gf(5, 3);
        let v = f.element(vec![1, 2, 3]).unwrap();
        let s = Subspace::span(&f, &[v.clone(), f.scale(2, &v), f.scale(3, &v)]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(Subspace::span(&f, &[]).unwrap().dim(), 0);
    }

    #[test]
    fn power_basis_spans_everything() {
        let f = gf(2, 4);
        let x = f.x();
        let powers: Vec<_> = (0..4).map(|i| f.pow(&x, i)).collect();
        assert_eq!(Subspace::span(&f, &powers).unwrap(), Subspace::whole(&f));
    }

    #[test]
    fn rref_shape() {
        let f = gf(3, 4);
        let vs = [vec![2, 1, 0, 1], vec![1, 1, 1, 1], vec![0, 2, 2, 0]];
        let vs: Vec<_> = vs.into_iter().map(|c| f.element(c).unwrap()).collect();
        let s = Subspace::span(&f, &vs).unwrap();
        let mut last_pivot = None;
        for (i, b) in s.basis().iter().enumerate() {
            let c = b.coeffs().iter().position(|&x| x != 0).unwrap();
            assert_eq!(b.coeffs()[c], 1);
            assert!(last_pivot.is_none_or(|l| c > l));
            for (j, other) in s.basis().iter().enumerate() {
                if i != j {
                    assert_eq!(other.coeffs()[c], 0);
                }
            }
            last_pivot = Some(c);
        }
    }

    #[test]
    fn idempotent_sum_and_intersection() {
        let f = gf(2, 6);
        let u = subfield_span(&f, 3);
        assert_eq!(u.intersect(&u).unwrap(), u);
        assert_eq!(u.sum(&u).unwrap(), u);
    }

    #[test]
    fn subfield_meets_span_of_one_and_x() {
        let f = gf(2, 4);
        let f4 = subfield_span(&f, 2);
        let line = Subspace::span(&f, &[f.one(), f.x()]).unwrap();
        let meet = f4.intersect(&line).unwrap();
        // F_4 = {0, 1, x^5, x^10}; x^5 = x^2 + x is not in span{1, x}
        assert_eq!(meet, Subspace::span(&f, &[f.one()]).unwrap());
        assert!(meet.contains(&f.one()).unwrap());
    }

    #[test]
    fn mismatched_fields_rejected() {
        let a = Subspace::whole(&gf(2, 4));
        let b = Subspace::whole(&gf(3, 2));
        assert_eq!(a.sum(&b), Err(Error::FieldMismatch));
        assert_eq!(a.intersect(&b), Err(Error::FieldMismatch));
        assert!(a.contains(&gf(3, 2).one()).is_err());
    }

    #[test]
    fn kernel_basis() {
        // x0 + x1 + x2 = 0 over F_3 has a 2-dimensional solution space
        let mut ech = Echelon::new(3, 3);
        ech.insert(vec![1, 1, 1]);
        let k = ech.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v.iter().sum::<u32>() % 3, 0);
        }
    }

    #[test]
    fn random_subspaces_have_requested_dim() {
        use rand::SeedableRng;
        let f = gf(3, 5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for d in 0..=5 {
            assert_eq!(Subspace::random(&f, d, &mut rng).unwrap().dim(), d);
        }
        assert!(Subspace::random(&f, 6, &mut rng).is_err());
    }

    #[test]
    fn text_format() {
        let f = gf(2, 4);
        let s = Subspace::from_text(&f, "# F_4\n1,0,0,0\n0,1,1,0\n\n").unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.to_text(), "1,0,0,0\n0,1,1,0\n");
        assert_eq!(Subspace::from_text(&f, &s.to_text()).unwrap(), s);
        assert!(Subspace::from_text(&f, "1,0,0\n").is_err());
        assert!(Subspace::from_text(&f, "1,0,2,0\n").is_err());
        assert!(Subspace::from_text(&f, "a,b\n").is_err());
    }
}
