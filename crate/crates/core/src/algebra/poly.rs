//! Multivariate polynomials over K with explicit truncation tracking.
//!
//! A `Poly` with `trunc = Some(D)` represents a power series known exactly in
//! all degrees ≤ D and unknown above; `trunc = None` is an honest polynomial.
//! Every operation propagates the tightest truncation bound it can certify,
//! and operations that would silently lose certified precision (substituting
//! something of order 0 into a jet, taking a leading form above the bound)
//! fail instead.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use super::binom::binom_in;
use super::coeff::{Field, K};
use super::unipoly::UPoly;
use crate::{Error, Result};

/// Exponent vector. Ordered by total degree ascending, ties broken so that
/// iteration within a degree goes lexicographically from the earliest
/// variable (x² before xy before y²), which is the canonical printing order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub SmallVec<[u16; 4]>);

impl Mono {
    pub fn one(nvars: usize) -> Mono {
        Mono(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize) -> Mono {
        let mut e = SmallVec::from_elem(0, nvars);
        e[i] = 1;
        Mono(e)
    }

    pub fn from_exps(exps: &[u32]) -> Mono {
        Mono(exps.iter().map(|&e| e as u16).collect())
    }

    pub fn deg(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0) as u32
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(other.0.iter()).map(|(&a, &b)| a + b).collect())
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(&a, &b)| a <= b)
    }

    pub fn div(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(other.0.iter()).map(|(&a, &b)| a - b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.deg()
            .cmp(&other.deg())
            // reverse lex on the exponents: larger leading exponent sorts first
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// The order (minimal degree) of a possibly truncated series: exactly d,
/// definitely above the truncation bound, or identically zero.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Ord3 {
    Finite(u32),
    /// All terms of degree ≤ t vanish and nothing more is known.
    Above(u32),
    Infinite,
}

impl Ord3 {
    /// Certified lower bound on the order.
    pub fn lower_bound(&self) -> u64 {
        match self {
            Ord3::Finite(d) => *d as u64,
            Ord3::Above(t) => *t as u64 + 1,
            Ord3::Infinite => u64::MAX,
        }
    }

    pub fn at_least(&self, n: u32) -> bool {
        self.lower_bound() >= n as u64
    }

    pub fn as_finite(&self) -> Option<u32> {
        match self {
            Ord3::Finite(d) => Some(*d),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Ord3::Infinite)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    pub nvars: usize,
    pub field: Field,
    pub terms: BTreeMap<Mono, K>,
    pub trunc: Option<u32>,
}

fn min_trunc(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (None, t) | (t, None) => t,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

impl Poly {
    pub fn zero(field: Field, nvars: usize) -> Poly {
        Poly { nvars, field, terms: BTreeMap::new(), trunc: None }
    }

    pub fn constant(field: Field, nvars: usize, k: K) -> Poly {
        let mut p = Poly::zero(field, nvars);
        if !k.is_zero() {
            p.terms.insert(Mono::one(nvars), k);
        }
        p
    }

    pub fn one(field: Field, nvars: usize) -> Poly {
        let k = field.one();
        Poly::constant(field, nvars, k)
    }

    pub fn var(field: Field, nvars: usize, i: usize) -> Poly {
        let mut p = Poly::zero(field.clone(), nvars);
        p.terms.insert(Mono::var(nvars, i), field.one());
        p
    }

    pub fn monomial(field: Field, nvars: usize, exps: &[u32], k: K) -> Poly {
        let mut p = Poly::zero(field, nvars);
        if !k.is_zero() {
            p.terms.insert(Mono::from_exps(exps), k);
        }
        p
    }

    /// No known terms (the series may still be nonzero beyond `trunc`).
    pub fn is_known_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The exact zero polynomial.
    pub fn is_exactly_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    pub fn order(&self) -> Ord3 {
        match self.terms.keys().next() {
            Some(m) => Ord3::Finite(m.deg()),
            None => match self.trunc {
                Some(t) => Ord3::Above(t),
                None => Ord3::Infinite,
            },
        }
    }

    /// Maximum degree among known terms.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.deg())
    }

    pub fn coeff(&self, exps: &[u32]) -> K {
        self.terms
            .get(&Mono::from_exps(exps))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    fn insert(&mut self, m: Mono, k: K) {
        if k.is_zero() {
            return;
        }
        if let Some(t) = self.trunc {
            if m.deg() > t {
                return;
            }
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(k);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&k);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn enforce_trunc(&mut self) {
        if let Some(t) = self.trunc {
            self.terms.retain(|m, _| m.deg() <= t);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Poly {
            nvars: self.nvars,
            field: self.field.clone(),
            terms: self.terms.clone(),
            trunc: min_trunc(self.trunc, other.trunc),
        };
        out.enforce_trunc();
        for (m, k) in &other.terms {
            out.insert(m.clone(), k.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for k in out.terms.values_mut() {
            *k = k.neg();
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &K) -> Poly {
        if k.is_zero() {
            let mut z = Poly::zero(self.field.clone(), self.nvars);
            z.trunc = self.trunc;
            return z;
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.mul(k);
        }
        out
    }

    pub fn mul_mono(&self, exps: &[u32], k: &K) -> Poly {
        let m = Mono::from_exps(exps);
        let shift = m.deg();
        let mut out = Poly {
            nvars: self.nvars,
            field: self.field.clone(),
            terms: BTreeMap::new(),
            trunc: self.trunc.map(|t| t + shift),
        };
        for (mm, kk) in &self.terms {
            out.insert(mm.mul(&m), kk.mul(k));
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        // trunc(fg) = min(D_f + ord(g), D_g + ord(f)) over the finite bounds
        let t = {
            let a = self
                .trunc
                .map(|d| (d as u64).saturating_add(other.order().lower_bound()));
            let b = other
                .trunc
                .map(|d| (d as u64).saturating_add(self.order().lower_bound()));
            match (a, b) {
                (None, None) => None,
                (Some(x), None) => Some(x),
                (None, Some(y)) => Some(y),
                (Some(x), Some(y)) => Some(x.min(y)),
            }
        }
        .map(|v| v.min(u32::MAX as u64) as u32);
        let mut out = Poly {
            nvars: self.nvars,
            field: self.field.clone(),
            terms: BTreeMap::new(),
            trunc: t,
        };
        for (m1, k1) in &self.terms {
            for (m2, k2) in &other.terms {
                out.insert(m1.mul(m2), k1.mul(k2));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.field.clone(), self.nvars);
        let mut sq = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    /// Truncate to degree ≤ d; the result is a jet with `trunc = d` (or the
    /// existing tighter bound).
    pub fn jet(&self, d: u32) -> Poly {
        let mut out = self.clone();
        out.trunc = Some(min_trunc(self.trunc, Some(d)).unwrap());
        out.enforce_trunc();
        out
    }

    /// Homogeneous part of degree d. Fails if the truncation cannot certify
    /// that every degree-d term is known.
    pub fn leading_form(&self, d: u32) -> Result<Poly> {
        if let Some(t) = self.trunc {
            if t < d {
                return Err(Error::Uncertified(format!(
                    "degree-{} form requested from a jet of order {}",
                    d, t
                )));
            }
        }
        let mut out = Poly::zero(self.field.clone(), self.nvars);
        for (m, k) in &self.terms {
            if m.deg() == d {
                out.terms.insert(m.clone(), k.clone());
            }
        }
        Ok(out)
    }

    /// Hasse (divided-power) derivative of order k in one variable:
    /// x^e ↦ C(e, k) x^(e-k).
    pub fn hasse(&self, var: usize, k: u32) -> Result<Poly> {
        if k == 0 {
            return Ok(self.clone());
        }
        let trunc = match self.trunc {
            Some(d) if d < k => {
                return Err(Error::Truncation(format!(
                    "Hasse derivative of order {} exceeds jet order {}",
                    k, d
                )))
            }
            Some(d) => Some(d - k),
            None => None,
        };
        let mut out = Poly {
            nvars: self.nvars,
            field: self.field.clone(),
            terms: BTreeMap::new(),
            trunc,
        };
        for (m, c) in &self.terms {
            let e = m.get(var);
            if e < k {
                continue;
            }
            let b = binom_in(&self.field, e as u64, k as u64);
            if b.is_zero() {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= k as u16;
            out.insert(Mono(exps), c.mul(&b));
        }
        Ok(out)
    }

    /// Iterated Hasse derivative D^(e) = D_{x1}^(e1) ∘ … ∘ D_{xn}^(en).
    pub fn hasse_multi(&self, orders: &[u32]) -> Result<Poly> {
        let mut out = self.clone();
        for (i, &k) in orders.iter().enumerate() {
            if k > 0 {
                out = out.hasse(i, k)?;
            }
        }
        Ok(out)
    }

    /// Minimal value of Σ_{i ∈ vars} e_i over the known support — the order
    /// along the coordinate subspace cut out by those variables. Computed on
    /// known terms only; on exact input it is exact.
    pub fn ord_along(&self, vars: &[usize]) -> Option<u32> {
        self.terms
            .keys()
            .map(|m| vars.iter().map(|&v| m.get(v)).sum())
            .min()
    }

    /// Exact division by a monomial. Known terms must all be divisible; the
    /// caller vouches for the unknown tail (e.g. a weak transform divides by
    /// the certified order along the blown-up center).
    pub fn divide_by_mono(&self, exps: &[u32]) -> Result<Poly> {
        let m = Mono::from_exps(exps);
        let shift = m.deg();
        let trunc = match self.trunc {
            Some(d) if d < shift => {
                return Err(Error::Truncation("monomial division exceeds jet order".into()))
            }
            Some(d) => Some(d - shift),
            None => None,
        };
        let mut out = Poly {
            nvars: self.nvars,
            field: self.field.clone(),
            terms: BTreeMap::new(),
            trunc,
        };
        for (mm, k) in &self.terms {
            if !m.divides(mm) {
                return Err(Error::Arithmetic(format!(
                    "term not divisible by monomial in exact division"
                )));
            }
            out.terms.insert(mm.div(&m), k.clone());
        }
        Ok(out)
    }

    /// Substitute images[i] for variable i. Truncations combine as
    /// min((D_f + 1)·m − 1, min_i D_{images_i}) with m the least order among
    /// the images that can appear; substituting an order-0 image into a
    /// proper jet is refused.
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly> {
        assert_eq!(images.len(), self.nvars, "one image per variable");
        let out_nvars = images.first().map(|g| g.nvars).unwrap_or(0);
        let out_field =
            images.first().map(|g| g.field.clone()).unwrap_or_else(|| self.field.clone());
        for g in images {
            assert_eq!(g.nvars, out_nvars);
            assert!(g.field == out_field, "substitution images in mixed fields");
        }

        let occurring: Vec<usize> = (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|m| m.get(i) > 0))
            .collect();

        // Bound A: unknown terms of f have degree > D and may involve any
        // variable, so they land in degree > D·m ≥ (D+1)·m − 1 ... precisely,
        // their images have order ≥ (D+1)·m.
        let a_bound = match self.trunc {
            None => None,
            Some(d) => {
                let m = (0..self.nvars)
                    .map(|i| images[i].order().lower_bound())
                    .min()
                    .unwrap_or(u64::MAX);
                if m == 0 {
                    return Err(Error::Truncation(
                        "substituting an order-0 image into a truncated series".into(),
                    ));
                }
                if m == u64::MAX {
                    None
                } else {
                    Some(((d as u64 + 1) * m - 1).min(u32::MAX as u64) as u32)
                }
            }
        };
        // Bound B: a truncated image limits everything it multiplies into.
        let b_bound = occurring
            .iter()
            .filter_map(|&i| images[i].trunc)
            .min();
        let t = min_trunc(a_bound, b_bound);

        let mut out = Poly {
            nvars: out_nvars,
            field: out_field.clone(),
            terms: BTreeMap::new(),
            trunc: t,
        };
        // Power cache per variable.
        let mut cache: Vec<BTreeMap<u32, Poly>> = vec![BTreeMap::new(); self.nvars];
        for (m, k) in &self.terms {
            let mut acc = Poly::constant(out_field.clone(), out_nvars, k.clone());
            if let Some(tt) = t {
                acc.trunc = min_trunc(acc.trunc, Some(tt));
            }
            for i in 0..self.nvars {
                let e = m.get(i);
                if e == 0 {
                    continue;
                }
                let pw = cache[i]
                    .entry(e)
                    .or_insert_with(|| {
                        let mut p = images[i].pow(e);
                        if let Some(tt) = t {
                            p = p.jet(tt);
                        }
                        p
                    })
                    .clone();
                acc = acc.mul(&pw);
                if let Some(tt) = t {
                    acc = acc.jet(tt);
                }
            }
            for (mm, kk) in acc.terms {
                out.insert(mm, kk);
            }
        }
        // The term-by-term jets may have tightened acc.trunc below t; the
        // sum as a whole is still certified to t, which `out` carries.
        out.enforce_trunc();
        Ok(out)
    }

    /// Substitute for a single variable, identity on the rest.
    pub fn subst_var(&self, var: usize, image: &Poly) -> Result<Poly> {
        let images: Vec<Poly> = (0..self.nvars)
            .map(|i| {
                if i == var {
                    image.clone()
                } else {
                    Poly::var(self.field.clone(), self.nvars, i)
                }
            })
            .collect();
        self.substitute(&images)
    }

    /// Full evaluation at a point (of the known part; exact when `trunc` is
    /// `None`, which oracle call sites require).
    pub fn eval(&self, point: &[K]) -> K {
        assert_eq!(point.len(), self.nvars);
        let mut acc = self.field.zero();
        for (m, k) in &self.terms {
            let mut term = k.clone();
            for i in 0..self.nvars {
                let e = m.get(i);
                if e > 0 {
                    term = term.mul(&point[i].pow(e as u64));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Map coefficients into another field (e.g. along a recorded extension).
    pub fn map_field<F>(&self, new_field: &Field, f: F) -> Result<Poly>
    where
        F: Fn(&K) -> Result<K>,
    {
        let mut out = Poly {
            nvars: self.nvars,
            field: new_field.clone(),
            terms: BTreeMap::new(),
            trunc: self.trunc,
        };
        for (m, k) in &self.terms {
            let nk = f(k)?;
            if !nk.is_zero() {
                out.terms.insert(m.clone(), nk);
            }
        }
        Ok(out)
    }

    /// View as univariate in `var`; fails if any other variable occurs.
    pub fn to_unipoly(&self, var: usize) -> Result<UPoly> {
        let mut coeffs: Vec<K> = vec![];
        for (m, k) in &self.terms {
            for i in 0..self.nvars {
                if i != var && m.get(i) > 0 {
                    return Err(Error::Internal(
                        "to_unipoly: polynomial is not univariate".into(),
                    ));
                }
            }
            let e = m.get(var) as usize;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, self.field.zero());
            }
            coeffs[e] = k.clone();
        }
        Ok(UPoly::new(self.field.clone(), coeffs))
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.deg());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Variables that occur in the known support.
    pub fn vars_used(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|m| m.get(i) > 0))
            .collect()
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", super::parse::print_poly(self, &refs))?;
        if let Some(t) = self.trunc {
            write!(f, " + O(deg {})", t + 1)?;
        }
        Ok(())
    }
}

/// Default chart variable names used by Debug printing.
pub fn default_names(nvars: usize) -> Vec<String> {
    match nvars {
        0 => vec![],
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        4 => vec!["x".into(), "y".into(), "z".into(), "w".into()],
        n => (0..n).map(|i| format!("x{}", i)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fq::FqField;
    use crate::algebra::parse::parse_poly;

    fn q3(src: &str) -> Poly {
        parse_poly(src, &["x", "y", "z"], &Field::Q).unwrap()
    }

    fn f2_3(src: &str) -> Poly {
        let f2 = Field::Fq(FqField::prime(2).unwrap());
        parse_poly(src, &["x", "y", "z"], &f2).unwrap()
    }

    #[test]
    fn orders_and_degrees() {
        let f = q3("z^2 - x^2*y");
        assert_eq!(f.order(), Ord3::Finite(2));
        assert_eq!(f.degree(), Some(3));
        assert_eq!(f.ord_along(&[0, 2]), Some(2)); // along V(x,z)
        assert_eq!(f.ord_along(&[1, 2]), Some(1)); // along V(y,z)
        let z = Poly::zero(Field::Q, 3);
        assert!(z.order().is_infinite());
        assert_eq!(z.jet(5).order(), Ord3::Above(5));
    }

    #[test]
    fn order_is_additive_under_mul() {
        let f = q3("z^2 - x^2*y");
        let g = q3("x + y^2");
        let fg = f.mul(&g);
        assert_eq!(
            fg.order().as_finite().unwrap(),
            f.order().as_finite().unwrap() + g.order().as_finite().unwrap()
        );
    }

    #[test]
    fn hasse_derivative_char_2() {
        // D_x of x^2 vanishes in characteristic 2 but the divided power
        // D_x^(2) x^2 = 1 survives.
        let f = f2_3("x^2");
        assert!(f.hasse(0, 1).unwrap().is_known_zero());
        let d2 = f.hasse(0, 2).unwrap();
        assert!(d2.is_homogeneous());
        assert_eq!(d2.coeff(&[0, 0, 0]), f.field.one());
    }

    #[test]
    fn hasse_divided_power_composition() {
        // D^(a) ∘ D^(b) = C(a+b, a) D^(a+b).
        let f = q3("x^7 + x^5*y^2 + z^3*x^4");
        for a in 1u32..=3 {
            for b in 1u32..=3 {
                let lhs = f.hasse(0, b).unwrap().hasse(0, a).unwrap();
                let c = binom_in(&Field::Q, (a + b) as u64, a as u64);
                let rhs = f.hasse(0, a + b).unwrap().scale(&c);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn substitution_is_a_ring_map() {
        let f = q3("z^2 - x^2*y");
        let g = q3("x*y + z");
        let images = vec![q3("x + y"), q3("y*z"), q3("z - x")];
        let lhs = f.mul(&g).substitute(&images).unwrap();
        let rhs = f.substitute(&images).unwrap().mul(&g.substitute(&images).unwrap());
        assert_eq!(lhs, rhs);
        let lhs = f.add(&g).substitute(&images).unwrap();
        let rhs = f.substitute(&images).unwrap().add(&g.substitute(&images).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_examples() {
        // Over F_2, z ← z + xy kills the cross term of z^2 + x^2 y^2.
        let f = f2_3("z^2 + x^2*y^2");
        let sub = f.subst_var(2, &f2_3("z + x*y")).unwrap();
        assert_eq!(sub, f2_3("z^2"));
        // Blow-up style monomial substitution stays exact.
        let f = q3("z^2 - x^2*y");
        let images = vec![q3("x"), q3("x*y"), q3("x*z")];
        let sub = f.substitute(&images).unwrap();
        assert_eq!(sub, q3("x^2*z^2 - x^3*y"));
        assert!(sub.trunc.is_none());
        let w = sub.divide_by_mono(&[2, 0, 0]).unwrap();
        assert_eq!(w, q3("z^2 - x*y"));
    }

    #[test]
    fn truncation_propagates() {
        let f = q3("z^2 - x^2*y").jet(10);
        // Monomial images of order 1: a jet of order 10 stays certified to 10.
        let images = vec![q3("x"), q3("x*y"), q3("x*z")];
        let sub = f.substitute(&images).unwrap();
        assert_eq!(sub.trunc, Some(10));
        // Substituting a unit into a jet must fail.
        let images_bad = vec![q3("x + 1"), q3("y"), q3("z")];
        assert!(matches!(
            f.substitute(&images_bad),
            Err(Error::Truncation(_))
        ));
        // ... but is fine on an exact polynomial.
        let g = q3("z^2 - x^2*y");
        assert!(g.substitute(&vec![q3("x + 1"), q3("y"), q3("z")]).is_ok());
    }

    #[test]
    fn mul_trunc_bound() {
        let f = q3("x^2 + y^3").jet(9); // order 2, trunc 9
        let g = q3("z^3");
        let h = f.mul(&g);
        // exact factor of order 3 pushes certification to 9 + 3
        assert_eq!(h.trunc, Some(12));
        let f2 = q3("x").jet(4);
        let g2 = q3("y").jet(7);
        let h2 = f2.mul(&g2);
        assert_eq!(h2.trunc, Some(5)); // min(4+1, 7+1)
    }

    #[test]
    fn leading_form_certification() {
        let f = q3("z^2 - x^2*y + x^5");
        assert_eq!(f.leading_form(2).unwrap(), q3("z^2"));
        let j = f.jet(1);
        assert!(matches!(j.leading_form(2), Err(Error::Uncertified(_))));
    }

    #[test]
    fn unipoly_view() {
        let f = q3("y^3 - 2*y + 1");
        let u = f.to_unipoly(1).unwrap();
        assert_eq!(u.deg(), Some(3));
        assert!(f.to_unipoly(0).is_err());
    }
}
