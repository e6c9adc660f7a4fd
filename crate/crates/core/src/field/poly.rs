//! Dense univariate polynomials over `F_p`, coefficients low-to-high.
//! Only what irreducibility testing needs.

use super::ntheory::inv_mod;

pub(crate) type Poly = Vec<u32>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo `m` (`m` nonzero).
pub(crate) fn rem(a: &[u32], m: &[u32], p: u32) -> Poly {
    let m = trim(m.to_vec());
    let mut a = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p) as u64;
    let p64 = p as u64;
    while a.len() > dm {
        let top = a.len() - 1;
        let c = a[top] as u64 * lead_inv % p64;
        let shift = top - dm;
        for (j, &mj) in m.iter().enumerate() {
            let sub = c * mj as u64 % p64;
            a[shift + j] = ((a[shift + j] as u64 + p64 - sub) % p64) as u32;
        }
        a = trim(a);
    }
    a
}

pub(crate) fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let p64 = p as u64;
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai as u64 * bj as u64) % p64;
        }
    }
    rem(&out.into_iter().map(|c| c as u32).collect::<Vec<_>>(), m, p)
}

pub(crate) fn pow_mod(base: &[u32], mut exp: u64, m: &[u32], p: u32) -> Poly {
    let mut acc = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(&acc, &b, m, p);
        }
        b = mul_mod(&b, &b, m, p);
        exp >>= 1;
    }
    acc
}

pub(crate) fn sub(a: &[u32], b: &[u32], p: u32) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            ((x as u64 + p as u64 - y as u64) % p as u64) as u32
        })
        .collect();
    trim(out)
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `f` monic of degree `n ≥ 1` is irreducible over `F_p` iff
/// `x^{p^n} ≡ x (mod f)` and `gcd(x^{p^k} − x, f) = 1` for `1 ≤ k ≤ n/2`.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let f = trim(f.to_vec());
    if f.len() < 2 {
        return false;
    }
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    // a root at zero is the cheapest certificate of reducibility
    if f[0] == 0 {
        return false;
    }
    let x = rem(&[0, 1], &f, p);
    let mut frob = x.clone();
    for k in 1..=n {
        frob = pow_mod(&frob, p as u64, &f, p);
        if k <= n / 2 {
            let g = gcd(&sub(&frob, &x, p), &f, p);
            if g.len() > 1 {
                return false;
            }
        }
    }
    frob == x
}
