//! The coefficient domain: Q (exact big rationals) or a finite field.
//! Every scalar knows which field it lives in; the engine never mixes them
//! implicitly.

use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use super::fq::{FqElem, FqField};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub enum Field {
    Q,
    Fq(Arc<FqField>),
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Q => write!(f, "Q"),
            Field::Fq(fq) => write!(f, "{:?}", fq),
        }
    }
}

impl Field {
    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Q => 0,
            Field::Fq(f) => f.p,
        }
    }

    /// p^k for finite fields, `None` over Q.
    pub fn size(&self) -> Option<u64> {
        match self {
            Field::Q => None,
            Field::Fq(f) => f.size().ok(),
        }
    }

    pub fn zero(&self) -> K {
        match self {
            Field::Q => K::Q(BigRational::zero()),
            Field::Fq(f) => K::F(f.zero()),
        }
    }

    pub fn one(&self) -> K {
        match self {
            Field::Q => K::Q(BigRational::one()),
            Field::Fq(f) => K::F(f.one()),
        }
    }

    pub fn from_i64(&self, n: i64) -> K {
        match self {
            Field::Q => K::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Fq(f) => K::F(f.from_i64(n)),
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> K {
        match self {
            Field::Q => K::Q(BigRational::from_integer(n.clone())),
            Field::Fq(f) => {
                let p = BigInt::from(f.p);
                let r = ((n % &p) + &p) % &p;
                let r: u64 = r.try_into().unwrap_or(0);
                K::F(f.from_u64(r))
            }
        }
    }

    /// All elements, for finite fields only.
    pub fn elements(&self) -> Result<Vec<K>> {
        match self {
            Field::Q => Err(Error::Internal("cannot enumerate Q".into())),
            Field::Fq(f) => Ok(f.elements()?.into_iter().map(K::F).collect()),
        }
    }

    /// Lift a scalar of a (recorded) subfield into this field.
    pub fn embed(&self, x: &K) -> Result<K> {
        match (self, x) {
            (Field::Q, K::Q(_)) => Ok(x.clone()),
            (Field::Fq(f), K::F(e)) => Ok(K::F(f.embed(e)?)),
            _ => Err(Error::Internal("cannot embed across characteristics".into())),
        }
    }
}

/// A scalar: a rational number or a finite-field element.
#[derive(Clone, PartialEq, Eq)]
pub enum K {
    Q(BigRational),
    F(FqElem),
}

impl K {
    pub fn field(&self) -> Field {
        match self {
            K::Q(_) => Field::Q,
            K::F(e) => Field::Fq(e.field.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            K::Q(r) => r.is_zero(),
            K::F(e) => e.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            K::Q(r) => r.is_one(),
            K::F(e) => !e.is_zero() && e.c == [1],
        }
    }

    pub fn add(&self, other: &K) -> K {
        match (self, other) {
            (K::Q(a), K::Q(b)) => K::Q(a + b),
            (K::F(a), K::F(b)) => K::F(a.add(b)),
            _ => panic!("mixed-field addition"),
        }
    }

    pub fn sub(&self, other: &K) -> K {
        match (self, other) {
            (K::Q(a), K::Q(b)) => K::Q(a - b),
            (K::F(a), K::F(b)) => K::F(a.sub(b)),
            _ => panic!("mixed-field subtraction"),
        }
    }

    pub fn neg(&self) -> K {
        match self {
            K::Q(a) => K::Q(-a),
            K::F(a) => K::F(a.neg()),
        }
    }

    pub fn mul(&self, other: &K) -> K {
        match (self, other) {
            (K::Q(a), K::Q(b)) => K::Q(a * b),
            (K::F(a), K::F(b)) => K::F(a.mul(b)),
            _ => panic!("mixed-field multiplication"),
        }
    }

    pub fn inv(&self) -> Result<K> {
        match self {
            K::Q(a) => {
                if a.is_zero() {
                    Err(Error::Arithmetic("division by zero".into()))
                } else {
                    Ok(K::Q(a.recip()))
                }
            }
            K::F(a) => Ok(K::F(a.inv()?)),
        }
    }

    pub fn div(&self, other: &K) -> Result<K> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u64) -> K {
        match self {
            K::Q(a) => {
                let mut acc = BigRational::one();
                let mut sq = a.clone();
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc *= &sq;
                    }
                    sq = &sq * &sq;
                    e >>= 1;
                }
                K::Q(acc)
            }
            K::F(a) => K::F(a.pow(e)),
        }
    }

    /// The p-th root where p is the characteristic. Over Q (char 0) this is
    /// the identity, matching the convention p^0 = 1 used by callers that
    /// unify both characteristics.
    pub fn pth_root(&self) -> K {
        match self {
            K::Q(_) => self.clone(),
            K::F(e) => K::F(e.pth_root()),
        }
    }

    /// p^s-th root: s Frobenius-inverse steps (identity over Q).
    pub fn ps_root(&self, s: u32) -> K {
        let mut v = self.clone();
        for _ in 0..s {
            v = v.pth_root();
        }
        v
    }

    /// An exact n-th root if one exists in the field.
    pub fn nth_root(&self, n: u64) -> Result<Option<K>> {
        if n == 0 {
            return Err(Error::Arithmetic("0th root".into()));
        }
        if n == 1 {
            return Ok(Some(self.clone()));
        }
        match self {
            K::Q(r) => {
                if r.is_zero() {
                    return Ok(Some(self.clone()));
                }
                if r.is_negative() && n % 2 == 0 {
                    return Ok(None);
                }
                let num = r.numer().abs();
                let den = r.denom().abs();
                let rn = num.nth_root(n as u32);
                let rd = den.nth_root(n as u32);
                if num::pow(rn.clone(), n as usize) == num
                    && num::pow(rd.clone(), n as usize) == den
                {
                    let mut root = BigRational::new(rn, rd);
                    if r.is_negative() {
                        root = -root;
                    }
                    Ok(Some(K::Q(root)))
                } else {
                    Ok(None)
                }
            }
            K::F(e) => Ok(e.nth_root(n)?.map(K::F)),
        }
    }
}

impl fmt::Display for K {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            K::Q(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            K::F(e) => write!(f, "{}", e),
        }
    }
}

impl fmt::Debug for K {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roots() {
        let f = Field::Q;
        let eight = f.from_i64(8);
        assert_eq!(eight.nth_root(3).unwrap(), Some(f.from_i64(2)));
        assert_eq!(f.from_i64(-8).nth_root(3).unwrap(), Some(f.from_i64(-2)));
        assert_eq!(f.from_i64(2).nth_root(2).unwrap(), None);
        let quarter = f.from_i64(1).div(&f.from_i64(4)).unwrap();
        let half = f.from_i64(1).div(&f.from_i64(2)).unwrap();
        assert_eq!(quarter.nth_root(2).unwrap(), Some(half));
    }

    #[test]
    fn fq_nth_root_by_enumeration() {
        let f9 = Field::Fq(FqField::extension(3, 2).unwrap());
        for e in f9.elements().unwrap() {
            // Cubing is the Frobenius, hence bijective: every element has a cube root.
            let r = e.nth_root(3).unwrap().expect("cube root exists");
            assert_eq!(r.pow(3), e);
        }
    }

    #[test]
    fn ps_root_inverts_ps_power() {
        let f4 = Field::Fq(FqField::extension(2, 2).unwrap());
        for e in f4.elements().unwrap() {
            assert_eq!(e.pow(4).ps_root(2), e);
        }
    }
}
