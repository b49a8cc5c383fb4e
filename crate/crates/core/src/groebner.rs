//! A compact Buchberger implementation for the handful of ideal-theoretic
//! questions the resolver asks in at most four variables: membership,
//! elimination, and dimension of a singular locus. Polynomials are treated
//! as exact here; callers either pass exact data or accept jet-level answers.

use std::collections::BTreeMap;

use crate::algebra::coeff::{Field, K};
use crate::algebra::poly::{Mono, Poly};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonoOrder {
    GrevLex,
    Lex,
    /// Eliminate the first `first` variables: compare that block first
    /// (by graded reverse lex), then the remaining block.
    Block { first: usize },
}

fn grevlex(a: &Mono, b: &Mono, lo: usize, hi: usize) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    let da: u32 = (lo..hi).map(|i| a.get(i)).sum();
    let db: u32 = (lo..hi).map(|i| b.get(i)).sum();
    match da.cmp(&db) {
        Equal => {}
        o => return o,
    }
    // rightmost differing exponent: smaller exponent is the larger monomial
    for i in (lo..hi).rev() {
        match a.get(i).cmp(&b.get(i)) {
            Equal => continue,
            std::cmp::Ordering::Less => return Greater,
            std::cmp::Ordering::Greater => return Less,
        }
    }
    Equal
}

impl MonoOrder {
    pub fn cmp(&self, a: &Mono, b: &Mono, nvars: usize) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match self {
            MonoOrder::GrevLex => grevlex(a, b, 0, nvars),
            MonoOrder::Lex => {
                for i in 0..nvars {
                    match a.get(i).cmp(&b.get(i)) {
                        Equal => continue,
                        o => return o,
                    }
                }
                Equal
            }
            MonoOrder::Block { first } => match grevlex(a, b, 0, *first) {
                Equal => grevlex(a, b, *first, nvars),
                o => o,
            },
        }
    }
}

/// Terms sorted descending in the chosen order; leading term first.
#[derive(Clone, Debug)]
struct GPoly {
    terms: Vec<(Mono, K)>,
}

impl GPoly {
    fn from_poly(f: &Poly, ord: MonoOrder) -> GPoly {
        let mut terms: Vec<(Mono, K)> =
            f.terms.iter().map(|(m, k)| (m.clone(), k.clone())).collect();
        terms.sort_by(|x, y| ord.cmp(&y.0, &x.0, f.nvars));
        GPoly { terms }
    }

    fn to_poly(&self, field: &Field, nvars: usize) -> Poly {
        let mut terms = BTreeMap::new();
        for (m, k) in &self.terms {
            terms.insert(m.clone(), k.clone());
        }
        Poly { nvars, field: field.clone(), terms, trunc: None }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lt(&self) -> &(Mono, K) {
        &self.terms[0]
    }
}

struct Ctx {
    field: Field,
    nvars: usize,
    ord: MonoOrder,
}

impl Ctx {
    fn add(&self, a: &GPoly, b: &GPoly) -> GPoly {
        let mut out: Vec<(Mono, K)> = Vec::with_capacity(a.terms.len() + b.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < a.terms.len() && j < b.terms.len() {
            match self.ord.cmp(&a.terms[i].0, &b.terms[j].0, self.nvars) {
                std::cmp::Ordering::Greater => {
                    out.push(a.terms[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push(b.terms[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = a.terms[i].1.add(&b.terms[j].1);
                    if !s.is_zero() {
                        out.push((a.terms[i].0.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a.terms[i..]);
        out.extend_from_slice(&b.terms[j..]);
        GPoly { terms: out }
    }

    fn mul_term(&self, f: &GPoly, m: &Mono, k: &K) -> GPoly {
        GPoly {
            terms: f
                .terms
                .iter()
                .map(|(mm, kk)| (mm.mul(m), kk.mul(k)))
                .collect(),
        }
    }

    /// Full normal form: reduce every term of f against the basis.
    fn normal_form(&self, f: &GPoly, basis: &[GPoly]) -> Result<GPoly> {
        let mut rest = f.clone();
        let mut out: Vec<(Mono, K)> = Vec::new();
        'outer: while !rest.is_zero() {
            let (m, c) = rest.lt().clone();
            for g in basis {
                let (gm, gc) = g.lt();
                if gm.divides(&m) {
                    let factor = c.div(gc)?;
                    let red = self.mul_term(g, &m.div(gm), &factor.neg());
                    rest = self.add(&rest, &red);
                    continue 'outer;
                }
            }
            out.push((m.clone(), c));
            rest.terms.remove(0);
        }
        Ok(GPoly { terms: out })
    }

    fn spoly(&self, f: &GPoly, g: &GPoly) -> Result<GPoly> {
        let (fm, fc) = f.lt();
        let (gm, gc) = g.lt();
        let lcm = Mono(
            fm.0.iter()
                .zip(gm.0.iter())
                .map(|(&a, &b)| a.max(b))
                .collect(),
        );
        let a = self.mul_term(f, &lcm.div(fm), &fc.inv()?);
        let b = self.mul_term(g, &lcm.div(gm), &gc.inv()?.neg());
        Ok(self.add(&a, &b))
    }
}

/// Reduced Gröbner basis (monic, fully inter-reduced, deterministic order).
pub fn groebner(gens: &[Poly], ord: MonoOrder) -> Result<Vec<Poly>> {
    let nonzero: Vec<&Poly> = gens.iter().filter(|g| !g.terms.is_empty()).collect();
    let Some(first) = nonzero.first() else {
        return Ok(vec![]);
    };
    let ctx = Ctx { field: first.field.clone(), nvars: first.nvars, ord };
    let mut basis: Vec<GPoly> = nonzero.iter().map(|g| GPoly::from_poly(g, ord)).collect();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..basis.len() {
        for j in 0..i {
            pairs.push((j, i));
        }
    }
    while !pairs.is_empty() {
        // normal selection: smallest lcm degree, then lowest indices
        let (best, _) = pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, &(i, j))| {
                let a = &basis[i].lt().0;
                let b = &basis[j].lt().0;
                let lcm_deg: u32 = a
                    .0
                    .iter()
                    .zip(b.0.iter())
                    .map(|(&x, &y)| x.max(y) as u32)
                    .sum();
                (lcm_deg, i, j)
            })
            .map(|(idx, &p)| (idx, p))
            .unwrap();
        let (i, j) = pairs.swap_remove(best);
        let (a, b) = (&basis[i], &basis[j]);
        // product criterion: coprime leading monomials reduce to zero
        let coprime = a
            .lt()
            .0
             .0
            .iter()
            .zip(b.lt().0 .0.iter())
            .all(|(&x, &y)| x.min(y) == 0);
        if coprime {
            continue;
        }
        let s = ctx.spoly(a, b)?;
        let nf = ctx.normal_form(&s, &basis)?;
        if !nf.is_zero() {
            let k = basis.len();
            for idx in 0..k {
                pairs.push((idx, k));
            }
            basis.push(nf);
        }
    }

    // minimalize: drop elements whose leading term another one divides
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..basis.len() {
            if i != j
                && keep[j]
                && basis[j].lt().0.divides(&basis[i].lt().0)
                && (basis[i].lt().0 != basis[j].lt().0 || j < i)
            {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<GPoly> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(g, k)| k.then_some(g))
        .collect();

    // inter-reduce and make monic
    let mut reduced: Vec<GPoly> = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<GPoly> = minimal
            .iter()
            .enumerate()
            .filter_map(|(j, g)| (j != i).then(|| g.clone()))
            .collect();
        let nf = ctx.normal_form(&minimal[i], &others)?;
        if nf.is_zero() {
            continue;
        }
        let inv = nf.lt().1.inv()?;
        reduced.push(ctx.mul_term(&nf, &Mono::one(ctx.nvars), &inv));
    }
    let mut out: Vec<Poly> = reduced
        .iter()
        .map(|g| g.to_poly(&ctx.field, ctx.nvars))
        .collect();
    out.sort_by(|a, b| {
        let la = GPoly::from_poly(a, ord).lt().0.clone();
        let lb = GPoly::from_poly(b, ord).lt().0.clone();
        ord.cmp(&la, &lb, ctx.nvars)
    });
    Ok(out)
}

/// Normal form of f against a Gröbner basis.
pub fn normal_form(f: &Poly, gb: &[Poly], ord: MonoOrder) -> Result<Poly> {
    if gb.is_empty() {
        return Ok(f.clone());
    }
    let ctx = Ctx { field: f.field.clone(), nvars: f.nvars, ord };
    let basis: Vec<GPoly> = gb.iter().map(|g| GPoly::from_poly(g, ord)).collect();
    let nf = ctx.normal_form(&GPoly::from_poly(f, ord), &basis)?;
    Ok(nf.to_poly(&f.field, f.nvars))
}

/// Ideal membership via normal form.
pub fn in_ideal(f: &Poly, gb: &[Poly], ord: MonoOrder) -> Result<bool> {
    Ok(normal_form(f, gb, ord)?.terms.is_empty())
}

/// Generators of I ∩ k[x_{k}, …]: Gröbner basis in a block order, keeping
/// the polynomials free of the first k variables.
pub fn eliminate(gens: &[Poly], first: usize) -> Result<Vec<Poly>> {
    let gb = groebner(gens, MonoOrder::Block { first })?;
    Ok(gb
        .into_iter()
        .filter(|g| (0..first).all(|i| g.terms.keys().all(|m| m.get(i) == 0)))
        .collect())
}

/// Krull dimension of V(gens) in affine n-space: the largest subset S of
/// variables such that no leading term of the basis lives in k[S];
/// -1 for the empty variety.
pub fn dimension(gens: &[Poly]) -> Result<i64> {
    let nonzero: Vec<&Poly> = gens.iter().filter(|g| !g.terms.is_empty()).collect();
    let Some(first) = nonzero.first() else {
        let n = gens.first().map(|g| g.nvars).unwrap_or(0);
        return Ok(n as i64);
    };
    let nvars = first.nvars;
    let gb = groebner(gens, MonoOrder::GrevLex)?;
    if gb.iter().any(|g| g.degree() == Some(0)) {
        return Ok(-1);
    }
    let lts: Vec<Mono> = gb
        .iter()
        .map(|g| GPoly::from_poly(g, MonoOrder::GrevLex).lt().0.clone())
        .collect();
    for size in (0..=nvars).rev() {
        for subset in subsets(nvars, size) {
            let independent = lts
                .iter()
                .all(|m| (0..nvars).any(|i| m.get(i) > 0 && !subset.contains(&i)));
            if independent {
                return Ok(size as i64);
            }
        }
    }
    Ok(0)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fq::FqField;
    use crate::algebra::parse::parse_poly;

    fn q(src: &str, vars: &[&str]) -> Poly {
        parse_poly(src, vars, &Field::Q).unwrap()
    }

    #[test]
    fn basis_of_x_and_x_plus_y() {
        let vars = ["x", "y"];
        let gb = groebner(&[q("x", &vars), q("x + y", &vars)], MonoOrder::GrevLex).unwrap();
        let printed: Vec<String> = gb
            .iter()
            .map(|g| crate::algebra::parse::print_poly(g, &vars))
            .collect();
        assert_eq!(printed.len(), 2);
        assert!(printed.contains(&"x".to_string()));
        assert!(printed.contains(&"y".to_string()));
    }

    #[test]
    fn membership() {
        let vars = ["x", "y", "z"];
        let gens = [q("z^2 - x^2*y", &vars), q("z^3", &vars)];
        let gb = groebner(&gens, MonoOrder::GrevLex).unwrap();
        assert!(in_ideal(&q("z^5 - x^2*y*z^3", &vars), &gb, MonoOrder::GrevLex).unwrap());
        assert!(!in_ideal(&q("z", &vars), &gb, MonoOrder::GrevLex).unwrap());
    }

    #[test]
    fn elimination_projects_the_twisted_intersection() {
        // z = x^2 and z = y imply x^2 - y = 0 after eliminating z.
        // Variable 0 is the one eliminated by Block{first: 1}.
        let vars = ["z", "x", "y"];
        let gens = [q("z - x^2", &vars), q("z - y", &vars)];
        let eli = eliminate(&gens, 1).unwrap();
        assert_eq!(eli.len(), 1);
        // monic in the block order: leading term x^2
        assert_eq!(eli[0], q("x^2 - y", &vars));
    }

    #[test]
    fn dimensions() {
        let vars = ["x", "y", "z"];
        assert_eq!(dimension(&[q("x", &vars), q("z", &vars)]).unwrap(), 1);
        assert_eq!(
            dimension(&[
                q("z^2 - x^2*y", &vars),
                q("z", &vars),
                q("x*y", &vars),
                q("x^2", &vars)
            ])
            .unwrap(),
            1
        );
        assert_eq!(dimension(&[q("x", &vars)]).unwrap(), 2);
        assert_eq!(
            dimension(&[q("x", &vars), q("y", &vars), q("z", &vars)]).unwrap(),
            0
        );
        assert_eq!(dimension(&[q("1", &vars)]).unwrap(), -1);
        let zero: Vec<Poly> = vec![crate::algebra::poly::Poly::zero(Field::Q, 3)];
        assert_eq!(dimension(&zero).unwrap(), 3);
    }

    #[test]
    fn char_2_basis() {
        let f2 = Field::Fq(FqField::prime(2).unwrap());
        let vars = ["x", "y", "z"];
        let p = |s: &str| parse_poly(s, &vars, &f2).unwrap();
        // Singular-locus shaped input for the Whitney umbrella in char 2.
        let gens = [p("z^2 + x^2*y"), p("x*y"), p("x^2")];
        assert_eq!(dimension(&gens).unwrap(), 1);
        let gb = groebner(&gens, MonoOrder::GrevLex).unwrap();
        assert!(in_ideal(&p("z^4"), &gb, MonoOrder::GrevLex).unwrap());
    }

    #[test]
    fn buchberger_agrees_with_hand_reduction() {
        // Classic example: <x^2 - y, x^3 - z> eliminating nothing;
        // y^3 - z^2 must be in the ideal.
        let vars = ["x", "y", "z"];
        let gens = [q("x^2 - y", &vars), q("x^3 - z", &vars)];
        let gb = groebner(&gens, MonoOrder::GrevLex).unwrap();
        assert!(in_ideal(&q("y^3 - z^2", &vars), &gb, MonoOrder::GrevLex).unwrap());
    }
}
