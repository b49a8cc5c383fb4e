//! Dense univariate polynomials over the coefficient field K, used for the
//! one-dimensional questions the resolver runs into: locating rational points
//! on an exceptional line, and producing minimal polynomials for a one-step
//! field extension when a singular point is not rational.

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

use super::coeff::{Field, K};
use crate::{Error, Result};

/// Coefficients by ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    pub field: Field,
    pub c: Vec<K>,
}

impl UPoly {
    pub fn new(field: Field, coeffs: Vec<K>) -> UPoly {
        let mut u = UPoly { field, c: coeffs };
        u.trim();
        u
    }

    pub fn zero(field: Field) -> UPoly {
        UPoly { field, c: vec![] }
    }

    pub fn x(field: Field) -> UPoly {
        let z = field.zero();
        let o = field.one();
        UPoly { field, c: vec![z, o] }
    }

    pub fn constant(field: Field, k: K) -> UPoly {
        UPoly::new(field, vec![k])
    }

    fn trim(&mut self) {
        while self.c.last().map(|k| k.is_zero()).unwrap_or(false) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.c.len().max(other.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.c.get(i).cloned().unwrap_or_else(|| self.field.zero());
            let b = other.c.get(i).cloned().unwrap_or_else(|| self.field.zero());
            out.push(a.add(&b));
        }
        UPoly::new(self.field.clone(), out)
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        let n = self.c.len().max(other.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.c.get(i).cloned().unwrap_or_else(|| self.field.zero());
            let b = other.c.get(i).cloned().unwrap_or_else(|| self.field.zero());
            out.push(a.sub(&b));
        }
        UPoly::new(self.field.clone(), out)
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero(self.field.clone());
        }
        let mut out = vec![self.field.zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UPoly::new(self.field.clone(), out)
    }

    pub fn scale(&self, k: &K) -> UPoly {
        UPoly::new(self.field.clone(), self.c.iter().map(|a| a.mul(k)).collect())
    }

    pub fn divmod(&self, div: &UPoly) -> Result<(UPoly, UPoly)> {
        if div.is_zero() {
            return Err(Error::Arithmetic("univariate division by zero".into()));
        }
        let db = div.deg().unwrap();
        let lead_inv = div.c[db].inv()?;
        let mut rem = self.clone();
        let mut quot = vec![self.field.zero(); self.c.len().saturating_sub(db)];
        while let Some(dr) = rem.deg() {
            if dr < db {
                break;
            }
            let c = rem.c[dr].mul(&lead_inv);
            quot[dr - db] = c.clone();
            for i in 0..=db {
                let t = rem.c[dr - db + i].sub(&c.mul(&div.c[i]));
                rem.c[dr - db + i] = t;
            }
            rem.trim();
        }
        Ok((UPoly::new(self.field.clone(), quot), rem))
    }

    pub fn rem(&self, div: &UPoly) -> Result<UPoly> {
        Ok(self.divmod(div)?.1)
    }

    pub fn monic(&self) -> Result<UPoly> {
        match self.deg() {
            None => Ok(self.clone()),
            Some(d) => {
                let inv = self.c[d].inv()?;
                Ok(self.scale(&inv))
            }
        }
    }

    pub fn gcd(&self, other: &UPoly) -> Result<UPoly> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &K) -> K {
        let mut acc = self.field.zero();
        for co in self.c.iter().rev() {
            acc = acc.mul(x).add(co);
        }
        acc
    }

    /// self^e mod m, square-and-multiply.
    pub fn pow_mod(&self, mut e: u64, m: &UPoly) -> Result<UPoly> {
        let mut acc = UPoly::constant(self.field.clone(), self.field.one());
        let mut sq = self.rem(m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq).rem(m)?;
            }
            sq = sq.mul(&sq).rem(m)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Divide out (x - root); panics if root is not actually a root.
    pub fn deflate(&self, root: &K) -> UPoly {
        let one = self.field.one();
        let lin = UPoly::new(self.field.clone(), vec![root.neg(), one]);
        let (q, r) = self.divmod(&lin).expect("linear divisor");
        assert!(r.is_zero(), "deflate at a non-root");
        q
    }
}

/// All roots of f in the coefficient field. Over a finite field this is an
/// exact enumeration. Over Q it is the rational root theorem; the second
/// component is `false` when the necessary integer factorisations did not
/// complete within the trial-division budget, meaning roots may be missing.
pub fn roots_in_field(f: &UPoly) -> Result<(Vec<K>, bool)> {
    if f.is_zero() {
        return Err(Error::Internal("root search on the zero polynomial".into()));
    }
    match &f.field {
        Field::Fq(_) => {
            let mut roots = Vec::new();
            for e in f.field.elements()? {
                if f.eval(&e).is_zero() {
                    roots.push(e);
                }
            }
            Ok((roots, true))
        }
        Field::Q => rational_roots(f),
    }
}

fn as_big(k: &K) -> &num::BigRational {
    match k {
        K::Q(r) => r,
        K::F(_) => unreachable!(),
    }
}

fn rational_roots(f: &UPoly) -> Result<(Vec<K>, bool)> {
    // Clear denominators and content, and strip the power of x.
    let mut lcm = BigInt::one();
    for k in &f.c {
        lcm = lcm.lcm(as_big(k).denom());
    }
    let ints: Vec<BigInt> = f.c.iter().map(|k| (as_big(k) * &lcm).to_integer()).collect();
    let v = ints.iter().position(|c| !c.is_zero()).unwrap();
    let mut roots = Vec::new();
    if v > 0 {
        roots.push(f.field.zero());
    }
    let ints = &ints[v..];
    if ints.len() == 1 {
        return Ok((roots, true));
    }
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    let (d0, c0) = bounded_divisors(&a0);
    let (dn, cn) = bounded_divisors(&an);
    let complete = c0 && cn;
    for num in &d0 {
        for den in &dn {
            for sign in [1i64, -1] {
                let cand = K::Q(num::BigRational::new(num * BigInt::from(sign), den.clone()));
                if f.eval(&cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    Ok((roots, complete))
}

/// Divisors of |n| from a trial-division factorisation capped at 10^6;
/// the flag is false when a composite cofactor survived the cap.
fn bounded_divisors(n: &BigInt) -> (Vec<BigInt>, bool) {
    let mut n = n.abs();
    if n.is_zero() {
        return (vec![], false);
    }
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut d = BigInt::from(2);
    let cap = BigInt::from(1_000_000u64);
    while &d * &d <= n && d <= cap {
        let mut m = 0u32;
        while (&n % &d).is_zero() {
            n = &n / &d;
            m += 1;
        }
        if m > 0 {
            primes.push((d.clone(), m));
        }
        d += 1;
    }
    let mut complete = true;
    if n > BigInt::one() {
        if &d * &d > n {
            primes.push((n.clone(), 1)); // leftover is prime
        } else {
            // Composite cofactor we refused to factor: its own divisors are
            // unavailable, record it as a pseudo-prime and flag incompleteness.
            primes.push((n.clone(), 1));
            complete = false;
        }
    }
    let mut divs = vec![BigInt::one()];
    for (p, m) in primes {
        let mut next = Vec::new();
        for e in 0..=m {
            let pe = num::pow(p.clone(), e as usize);
            for d in &divs {
                next.push(d * &pe);
            }
        }
        divs = next;
    }
    divs.sort();
    divs.dedup();
    (divs, complete)
}

/// For f over F_q: the minimal degree d of an irreducible factor, together
/// with one monic irreducible factor of that degree. Degree-1 factors are
/// found first, so this returns a rational root whenever one exists.
pub fn min_degree_irreducible_factor(f: &UPoly) -> Result<UPoly> {
    let q = match &f.field {
        Field::Fq(fq) => fq.size()?,
        Field::Q => return Err(Error::Internal("distinct-degree over Q".into())),
    };
    let n = f
        .deg()
        .ok_or_else(|| Error::Internal("factoring the zero polynomial".into()))?;
    if n == 0 {
        return Err(Error::Internal("factoring a unit".into()));
    }
    let f = f.monic()?;
    let x = UPoly::x(f.field.clone());
    let mut u = x.rem(&f)?;
    for d in 1..=n {
        u = u.pow_mod(q, &f)?; // now u = x^(q^d) mod f
        let g = u.sub(&x).gcd(&f)?;
        if let Some(dg) = g.deg() {
            if dg >= 1 {
                // g is a squarefree product of irreducibles of degree exactly d.
                if dg == d {
                    return Ok(g);
                }
                return extract_degree_d_factor(&g, d, q);
            }
        }
    }
    Err(Error::Internal("distinct-degree search found no factor".into()))
}

fn extract_degree_d_factor(g: &UPoly, d: usize, q: u64) -> Result<UPoly> {
    let total = (q as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if total > 1_000_000 {
        return Err(Error::Unsupported(format!(
            "factor extraction over {} candidates refused",
            total
        )));
    }
    let els = g.field.elements()?;
    let qs = els.len() as u128;
    for idx in 0..total {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut rest = idx;
        for _ in 0..d {
            coeffs.push(els[(rest % qs) as usize].clone());
            rest /= qs;
        }
        coeffs.push(g.field.one());
        let h = UPoly::new(g.field.clone(), coeffs);
        if g.rem(&h)?.is_zero() {
            return Ok(h);
        }
    }
    Err(Error::Internal("no degree-d divisor found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fq::FqField;

    fn qp(coeffs: &[i64]) -> UPoly {
        UPoly::new(Field::Q, coeffs.iter().map(|&c| Field::Q.from_i64(c)).collect())
    }

    #[test]
    fn divmod_and_gcd() {
        // (x-1)(x-2) = x^2 - 3x + 2, gcd with (x-1)(x+5) = x^2 + 4x - 5 is x-1.
        let a = qp(&[2, -3, 1]);
        let b = qp(&[-5, 4, 1]);
        let g = a.gcd(&b).unwrap();
        assert_eq!(g, qp(&[-1, 1]));
        let (q, r) = a.divmod(&g).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, qp(&[-2, 1]));
    }

    #[test]
    fn rational_roots_small() {
        // 2x^3 - 3x^2 - 3x + 2 has roots 2, -1, 1/2.
        let f = qp(&[2, -3, -3, 2]);
        let (roots, complete) = roots_in_field(&f).unwrap();
        assert!(complete);
        let half = Field::Q.from_i64(1).div(&Field::Q.from_i64(2)).unwrap();
        assert!(roots.contains(&Field::Q.from_i64(2)));
        assert!(roots.contains(&Field::Q.from_i64(-1)));
        assert!(roots.contains(&half));
        assert_eq!(roots.len(), 3);
    }

    #[test]
    fn rational_roots_with_zero() {
        let f = qp(&[0, 0, -4, 1]); // x^2 (x - 4)
        let (roots, complete) = roots_in_field(&f).unwrap();
        assert!(complete);
        assert!(roots.contains(&Field::Q.from_i64(0)));
        assert!(roots.contains(&Field::Q.from_i64(4)));
    }

    #[test]
    fn fq_roots_enumerated() {
        let f5 = Field::Fq(FqField::prime(5).unwrap());
        // x^2 + 1 over F_5: roots 2 and 3.
        let f = UPoly::new(f5.clone(), vec![f5.from_i64(1), f5.zero(), f5.one()]);
        let (roots, _) = roots_in_field(&f).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.contains(&f5.from_i64(2)));
        assert!(roots.contains(&f5.from_i64(3)));
    }

    #[test]
    fn min_factor_degree_two() {
        let f3 = Field::Fq(FqField::prime(3).unwrap());
        // x^2 + 1 is irreducible over F_3.
        let f = UPoly::new(f3.clone(), vec![f3.one(), f3.zero(), f3.one()]);
        let h = min_degree_irreducible_factor(&f).unwrap();
        assert_eq!(h.deg(), Some(2));
        // (x^2+1)(x-1): minimal degree factor is x-1.
        let lin = UPoly::new(f3.clone(), vec![f3.from_i64(-1), f3.one()]);
        let g = f.mul(&lin);
        let h = min_degree_irreducible_factor(&g).unwrap();
        assert_eq!(h.deg(), Some(1));
        assert!(h.eval(&f3.from_i64(1)).is_zero());
    }
}
