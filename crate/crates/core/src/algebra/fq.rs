//! Finite fields F_{p^k} represented as F_p[t]/(m(t)) with m monic
//! irreducible of degree k. Fields are shared behind `Arc`; elements carry a
//! handle to their field so mixed-field arithmetic is caught immediately.
//!
//! Sizes are deliberately modest (the engine works over small ground fields
//! and their one-step extensions), so element enumeration is a legitimate
//! tool and everything stays exact on `u64` limbs.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

// ---------- arithmetic mod p ----------

#[inline]
pub(crate) fn addp(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn subp(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub(crate) fn mulp(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Inverse mod p via the extended Euclidean algorithm.
pub(crate) fn invp(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "invp of non-unit");
    (s0.rem_euclid(p as i128)) as u64
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

// ---------- dense univariate polynomials over F_p ----------
// Representation: Vec<u64>, index = degree, no trailing zeros.

pub(crate) fn ptrim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub(crate) fn padd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = addp(x, y, p);
    }
    ptrim(out)
}

pub(crate) fn psub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = subp(x, y, p);
    }
    ptrim(out)
}

pub(crate) fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addp(out[i + j], mulp(x, y, p), p);
        }
    }
    ptrim(out)
}

/// Division with remainder; divisor must be nonzero.
pub(crate) fn pdivmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = invp(b[db], p);
    if rem.len() <= db {
        return (vec![], ptrim(rem));
    }
    let mut quot = vec![0u64; rem.len() - db];
    while rem.len() > db && !rem.is_empty() {
        let dr = rem.len() - 1;
        let c = mulp(rem[dr], lead_inv, p);
        if c != 0 {
            quot[dr - db] = c;
            for i in 0..=db {
                rem[dr - db + i] = subp(rem[dr - db + i], mulp(c, b[i], p), p);
            }
        } else {
            rem.pop();
            continue;
        }
        rem = ptrim(rem);
    }
    (ptrim(quot), ptrim(rem))
}

pub(crate) fn pmonic(a: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() {
        return vec![];
    }
    let inv = invp(*a.last().unwrap(), p);
    a.iter().map(|&c| mulp(c, inv, p)).collect()
}

pub(crate) fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    while !y.is_empty() {
        let (_, r) = pdivmod(&x, &y, p);
        x = y;
        y = r;
    }
    if x.is_empty() {
        x
    } else {
        pmonic(&x, p)
    }
}

/// base^p mod f — one Frobenius step, exponent always fits.
fn p_frob_step(base: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut sq = base.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = pdivmod(&pmul(&acc, &sq, p), f, p).1;
        }
        sq = pdivmod(&pmul(&sq, &sq, p), f, p).1;
        e >>= 1;
    }
    acc
}

/// Irreducibility of a monic f over F_p: f of degree k is irreducible iff it
/// shares no factor with x^{p^d} - x for any d ≤ k/2.
pub(crate) fn is_irreducible_fp(f: &[u64], p: u64) -> bool {
    let k = f.len().saturating_sub(1);
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let mut u = pdivmod(&x, f, p).1;
    for _ in 1..=k / 2 {
        u = p_frob_step(&u, f, p);
        let g = pgcd(&psub(&u, &x, p), f, p);
        if !g.is_empty() && g.len() - 1 >= 1 {
            return false;
        }
    }
    true
}

/// First monic irreducible of degree k over F_p in counter order (constant
/// coefficient fastest). Deterministic, so every run builds the same tower;
/// for F_4 this is t^2 + t + 1.
pub(crate) fn canonical_irreducible(p: u64, k: usize) -> Result<Vec<u64>> {
    if k == 1 {
        return Ok(vec![0, 1]);
    }
    let total = (p as u128).checked_pow(k as u32).ok_or_else(|| {
        Error::Unsupported(format!("field F_{{{}^{}}} too large to construct", p, k))
    })?;
    if total > 10_000_000 {
        return Err(Error::Unsupported(format!(
            "field F_{{{}^{}}} too large to construct",
            p, k
        )));
    }
    for c in 0..total {
        let mut f = vec![0u64; k + 1];
        let mut rest = c;
        for coeff in f.iter_mut().take(k) {
            *coeff = (rest % p as u128) as u64;
            rest /= p as u128;
        }
        f[k] = 1;
        if is_irreducible_fp(&f, p) {
            return Ok(f);
        }
    }
    Err(Error::Internal(format!("no irreducible of degree {} over F_{}", k, p)))
}

// ---------- the field object ----------

/// A finite field F_{p^k} = F_p[t]/(min_poly). `embed_from` records the
/// previous field in an extension tower together with the image of its
/// generator, so elements can be mapped up when a chart needs a bigger field.
pub struct FqField {
    pub p: u64,
    pub k: usize,
    /// Monic, length k+1, coefficients in F_p. For k = 1 this is t itself.
    pub min_poly: Vec<u64>,
    pub embed_from: Option<(Arc<FqField>, Vec<u64>)>,
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.min_poly == other.min_poly
    }
}
impl Eq for FqField {}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{{{}^{}}}", self.p, self.k)
        }
    }
}

impl FqField {
    pub fn prime(p: u64) -> Result<Arc<FqField>> {
        if !is_prime_u64(p) {
            return Err(Error::Parse(format!("{} is not prime", p)));
        }
        Ok(Arc::new(FqField { p, k: 1, min_poly: vec![0, 1], embed_from: None }))
    }

    /// F_{p^k} with the canonical (first-in-enumeration) minimal polynomial.
    pub fn extension(p: u64, k: usize) -> Result<Arc<FqField>> {
        if !is_prime_u64(p) {
            return Err(Error::Parse(format!("{} is not prime", p)));
        }
        if k == 0 {
            return Err(Error::Parse("extension degree must be positive".into()));
        }
        let mp = canonical_irreducible(p, k)?;
        Ok(Arc::new(FqField { p, k, min_poly: mp, embed_from: None }))
    }

    /// F_p[t]/(m) for a caller-supplied monic irreducible m.
    pub fn with_min_poly(p: u64, mp: Vec<u64>) -> Result<Arc<FqField>> {
        if !is_prime_u64(p) {
            return Err(Error::Parse(format!("{} is not prime", p)));
        }
        let mp = ptrim(mp.into_iter().map(|c| c % p).collect());
        if mp.len() < 2 {
            return Err(Error::Parse("minimal polynomial must have degree >= 1".into()));
        }
        if *mp.last().unwrap() != 1 {
            return Err(Error::Parse("minimal polynomial must be monic".into()));
        }
        if !is_irreducible_fp(&mp, p) {
            return Err(Error::Parse("minimal polynomial is reducible".into()));
        }
        let k = mp.len() - 1;
        Ok(Arc::new(FqField { p, k, min_poly: mp, embed_from: None }))
    }

    /// Number of elements p^k; errors only for absurd sizes.
    pub fn size(&self) -> Result<u64> {
        (self.p as u128)
            .checked_pow(self.k as u32)
            .filter(|&q| q <= u64::MAX as u128)
            .map(|q| q as u64)
            .ok_or_else(|| Error::Unsupported("field too large".into()))
    }

    fn reduce(&self, v: Vec<u64>) -> Vec<u64> {
        if v.len() <= self.k {
            ptrim(v)
        } else {
            pdivmod(&v, &self.min_poly, self.p).1
        }
    }

    pub fn el(self: &Arc<Self>, coeffs: Vec<u64>) -> FqElem {
        let c = self.reduce(coeffs.into_iter().map(|x| x % self.p).collect());
        FqElem { field: self.clone(), c }
    }

    pub fn from_u64(self: &Arc<Self>, n: u64) -> FqElem {
        self.el(vec![n])
    }

    pub fn from_i64(self: &Arc<Self>, n: i64) -> FqElem {
        let r = n.rem_euclid(self.p as i64) as u64;
        self.from_u64(r)
    }

    pub fn zero(self: &Arc<Self>) -> FqElem {
        FqElem { field: self.clone(), c: vec![] }
    }

    pub fn one(self: &Arc<Self>) -> FqElem {
        self.from_u64(1)
    }

    /// The residue t of the generator (equals 0 when k = 1 since m = t).
    pub fn gen(self: &Arc<Self>) -> FqElem {
        self.el(vec![0, 1])
    }

    /// All q elements, in a fixed deterministic order (counter on the
    /// coefficient vector, constant coefficient fastest).
    pub fn elements(self: &Arc<Self>) -> Result<Vec<FqElem>> {
        let q = self.size()?;
        if q > 1_000_000 {
            return Err(Error::Unsupported(format!(
                "enumeration over {} elements refused",
                q
            )));
        }
        let mut out = Vec::with_capacity(q as usize);
        for n in 0..q {
            let mut c = vec![0u64; self.k];
            let mut rest = n;
            for limb in c.iter_mut() {
                *limb = rest % self.p;
                rest /= self.p;
            }
            out.push(FqElem { field: self.clone(), c: ptrim(c) });
        }
        Ok(out)
    }

    /// Extend to F_{q^d}, returned as a flat F_p[t]/(canonical) together with
    /// the image of this field's generator. The embedding is found by root
    /// enumeration, which is fine at the sizes the engine permits.
    pub fn extend(self: &Arc<Self>, d: usize) -> Result<Arc<FqField>> {
        if d <= 1 {
            return Ok(self.clone());
        }
        let kk = self.k * d;
        let mp = canonical_irreducible(self.p, kk)?;
        let big = Arc::new(FqField { p: self.p, k: kk, min_poly: mp, embed_from: None });
        if self.k == 1 {
            // Prime field embeds trivially; generator image is irrelevant.
            let e = Arc::new(FqField {
                p: self.p,
                k: kk,
                min_poly: big.min_poly.clone(),
                embed_from: Some((self.clone(), vec![0, 1])),
            });
            return Ok(e);
        }
        let root = big
            .elements()?
            .into_iter()
            .find(|cand| cand.eval_fp_poly(&self.min_poly).is_zero())
            .ok_or_else(|| Error::Internal("minimal polynomial has no root upstairs".into()))?;
        Ok(Arc::new(FqField {
            p: self.p,
            k: kk,
            min_poly: big.min_poly.clone(),
            embed_from: Some((self.clone(), root.c)),
        }))
    }

    /// Map an element of the `embed_from` field (or of any field further down
    /// the recorded tower, or of the prime field) into this field.
    pub fn embed(self: &Arc<Self>, x: &FqElem) -> Result<FqElem> {
        if x.field.as_ref() == self.as_ref() {
            return Ok(FqElem { field: self.clone(), c: x.c.clone() });
        }
        if x.field.k == 1 {
            return Ok(self.el(x.c.clone()));
        }
        let mut hops: Vec<Arc<FqField>> = vec![self.clone()];
        let mut cur = self.clone();
        loop {
            match &cur.embed_from {
                Some((from, _)) => {
                    if from.as_ref() == x.field.as_ref() {
                        // Fold the chain of generator images top-down.
                        let mut val = x.clone();
                        for step in hops.iter().rev() {
                            let (_, img) = step.embed_from.as_ref().unwrap();
                            let gen_img = FqElem { field: step.clone(), c: img.clone() };
                            val = gen_img.eval_tower(&val, step);
                        }
                        return Ok(val);
                    }
                    hops.push(from.clone());
                    cur = from.clone();
                }
                None => {
                    return Err(Error::Internal(format!(
                        "no embedding of {:?} into {:?} on record",
                        x.field, self
                    )))
                }
            }
        }
    }
}

/// An element of a finite field: the residue of a polynomial in t, stored as
/// coefficients c[0] + c[1] t + …, trimmed.
#[derive(Clone)]
pub struct FqElem {
    pub field: Arc<FqField>,
    pub c: Vec<u64>,
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        self.field.as_ref() == other.field.as_ref() && self.c == other.c
    }
}
impl Eq for FqElem {}

impl FqElem {
    fn same_field(&self, other: &FqElem) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || self.field.as_ref() == other.field.as_ref(),
            "mixed-field arithmetic: {:?} vs {:?}",
            self.field,
            other.field
        );
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn add(&self, other: &FqElem) -> FqElem {
        self.same_field(other);
        FqElem { field: self.field.clone(), c: padd(&self.c, &other.c, self.field.p) }
    }

    pub fn sub(&self, other: &FqElem) -> FqElem {
        self.same_field(other);
        FqElem { field: self.field.clone(), c: psub(&self.c, &other.c, self.field.p) }
    }

    pub fn neg(&self) -> FqElem {
        FqElem { field: self.field.clone(), c: psub(&[], &self.c, self.field.p) }
    }

    pub fn mul(&self, other: &FqElem) -> FqElem {
        self.same_field(other);
        let prod = pmul(&self.c, &other.c, self.field.p);
        FqElem { field: self.field.clone(), c: self.field.reduce(prod) }
    }

    /// Inverse via the extended Euclidean algorithm in F_p[t].
    pub fn inv(&self) -> Result<FqElem> {
        if self.is_zero() {
            return Err(Error::Arithmetic("division by zero".into()));
        }
        let p = self.field.p;
        let (mut r0, mut r1) = (self.field.min_poly.clone(), self.c.clone());
        let (mut s0, mut s1) = (vec![], vec![1u64]);
        while !r1.is_empty() {
            let (q, r) = pdivmod(&r0, &r1, p);
            let s = psub(&s0, &pmul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 = gcd, a nonzero constant since min_poly is irreducible.
        debug_assert_eq!(r0.len(), 1);
        let scale = invp(r0[0], p);
        let c = s0.iter().map(|&x| mulp(x, scale, p)).collect();
        Ok(FqElem { field: self.field.clone(), c: self.field.reduce(c) })
    }

    pub fn pow(&self, mut e: u64) -> FqElem {
        let mut acc = self.field.one();
        let mut sq = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            e >>= 1;
        }
        acc
    }

    /// The unique p-th root (Frobenius is bijective on a finite field):
    /// x^(p^(k-1)).
    pub fn pth_root(&self) -> FqElem {
        let mut v = self.clone();
        for _ in 1..self.field.k {
            v = v.pow(self.field.p);
        }
        v
    }

    /// An n-th root if one exists, found by enumeration; `None` otherwise.
    pub fn nth_root(&self, n: u64) -> Result<Option<FqElem>> {
        if self.is_zero() {
            return Ok(Some(self.clone()));
        }
        for cand in self.field.elements()? {
            if cand.pow(n) == *self {
                return Ok(Some(cand));
            }
        }
        Ok(None)
    }

    /// Evaluate an F_p[t]-polynomial at this element (used when embedding:
    /// the minimal polynomial of a subfield generator).
    pub(crate) fn eval_fp_poly(&self, poly: &[u64]) -> FqElem {
        let mut acc = self.field.zero();
        for &co in poly.iter().rev() {
            acc = acc.mul(self);
            acc = acc.add(&self.field.from_u64(co));
        }
        acc
    }

    /// Evaluate this element's coefficient vector at `at` inside `target`:
    /// Σ c[i] · at^i. Used to push elements up an extension tower.
    fn eval_tower(&self, x: &FqElem, target: &Arc<FqField>) -> FqElem {
        let mut acc = target.zero();
        for &co in x.c.iter().rev() {
            acc = acc.mul(self);
            acc = acc.add(&target.from_u64(co));
        }
        acc
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (i, &co) in self.c.iter().enumerate() {
            if co == 0 {
                continue;
            }
            let part = match i {
                0 => format!("{}", co),
                1 => {
                    if co == 1 {
                        "t".to_string()
                    } else {
                        format!("{}*t", co)
                    }
                }
                _ => {
                    if co == 1 {
                        format!("t^{}", i)
                    } else {
                        format!("{}*t^{}", co, i)
                    }
                }
            };
            parts.push(part);
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f5 = FqField::prime(5).unwrap();
        let a = f5.from_u64(3);
        let b = f5.from_u64(4);
        assert_eq!(a.add(&b), f5.from_u64(2));
        assert_eq!(a.mul(&b), f5.from_u64(2));
        assert_eq!(a.inv().unwrap().mul(&a), f5.one());
        assert_eq!(a.pow(4), f5.one());
    }

    #[test]
    fn f4_canonical_min_poly() {
        // The first irreducible quadratic over F_2 in counter order.
        let f4 = FqField::extension(2, 2).unwrap();
        assert_eq!(f4.min_poly, vec![1, 1, 1]); // t^2 + t + 1
        let t = f4.gen();
        // t^2 = t + 1, t^3 = 1.
        assert_eq!(t.mul(&t), t.add(&f4.one()));
        assert_eq!(t.pow(3), f4.one());
    }

    #[test]
    fn f9_inverses_and_roots() {
        let f9 = FqField::extension(3, 2).unwrap();
        for e in f9.elements().unwrap() {
            if e.is_zero() {
                continue;
            }
            assert_eq!(e.inv().unwrap().mul(&e), f9.one());
            // Frobenius root really is an inverse of cubing.
            assert_eq!(e.pth_root().pow(3), e);
        }
    }

    #[test]
    fn frobenius_is_additive() {
        let f8 = FqField::extension(2, 3).unwrap();
        let els = f8.elements().unwrap();
        for a in &els {
            for b in &els {
                assert_eq!(a.add(b).pow(2), a.pow(2).add(&b.pow(2)));
            }
        }
    }

    #[test]
    fn extension_embedding_respects_ops() {
        let f4 = FqField::extension(2, 2).unwrap();
        let f16 = f4.extend(2).unwrap();
        assert_eq!(f16.k, 4);
        let t = f4.gen();
        let img = f16.embed(&t).unwrap();
        // The image satisfies the old minimal polynomial t^2 + t + 1 = 0.
        let val = img.mul(&img).add(&img).add(&f16.one());
        assert!(val.is_zero());
        for a in f4.elements().unwrap() {
            for b in f4.elements().unwrap() {
                let lhs = f16.embed(&a.mul(&b)).unwrap();
                let rhs = f16.embed(&a).unwrap().mul(&f16.embed(&b).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn irreducibility_detects_reducible() {
        // t^2 + 1 = (t+1)^2 over F_2.
        assert!(!is_irreducible_fp(&[1, 0, 1], 2));
        assert!(is_irreducible_fp(&[1, 1, 1], 2));
        // t^2 + 1 is irreducible over F_3.
        assert!(is_irreducible_fp(&[1, 0, 1], 3));
    }

    #[test]
    fn user_min_poly_checked() {
        assert!(FqField::with_min_poly(2, vec![1, 0, 1]).is_err());
        let f = FqField::with_min_poly(3, vec![1, 0, 1]).unwrap();
        assert_eq!(f.size().unwrap(), 9);
        let t = f.gen();
        assert_eq!(t.mul(&t), f.from_i64(-1));
    }
}
