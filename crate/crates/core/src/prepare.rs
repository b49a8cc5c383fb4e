//! Preparation of the Newton polygon: vertex solvability, well preparation,
//! translation moves, very well preparation, the τ = 2 recentering test and
//! perfect-power extraction.
//!
//! A vertex (a, b) of |Δ| is *solvable* when a, b are integers and there is
//! η ≠ 0 such that every order-r generator matches the pattern
//! b_00r·(z − η x^a y^b)^r on the vertex positions; the substitution
//! z ← z − η x^a y^b then removes the vertex. In characteristic p with
//! r = r0·p^s the first surviving binomial sits at λ = p^s and η is found by
//! s inverse-Frobenius steps; in characteristic zero λ = 1 is linear in η.

use num::rational::BigRational;
use num::{One, Signed, ToPrimitive};

use crate::algebra::binom::binom_in;
use crate::algebra::coeff::{Field, K};
use crate::algebra::poly::{Mono, Ord3, Poly};
use crate::algebra::unipoly::{roots_in_field, UPoly};
use crate::polygon::{build_delta, rat_str, Invariants, Polygon, Rat};
use crate::singular::CoordChange;
use crate::{Budgets, Error, Result};

/// r = r0 · p^s with p ∤ r0; over Q this degenerates to (r, 0, 1).
pub fn split_p_power(field: &Field, r: u32) -> (u32, u32, u32) {
    let p = field.characteristic() as u32;
    if p == 0 {
        return (r, 0, 1);
    }
    let mut r0 = r;
    let mut s = 0;
    while r0 % p == 0 {
        r0 /= p;
        s += 1;
    }
    (r0, s, p.pow(s))
}

fn neg_one_pow(field: &Field, e: u32) -> K {
    if e % 2 == 0 {
        field.one()
    } else {
        field.one().neg()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexStatus {
    Prepared,
    Solvable { eta: K },
}

fn as_integer(r: &Rat) -> Option<u32> {
    if r.denom().is_one() && !r.numer().is_negative() {
        r.numer().to_u32()
    } else {
        None
    }
}

/// Decide whether the polygon vertex (a, b) is prepared or solvable, and if
/// solvable produce the η of the removing substitution.
pub fn vertex_test(gens: &[Poly], r: u32, vertex: &(Rat, Rat)) -> Result<VertexStatus> {
    let field = gens[0].field.clone();
    let (Some(a), Some(b)) = (as_integer(&vertex.0), as_integer(&vertex.1)) else {
        return Ok(VertexStatus::Prepared);
    };

    // Collect the vertex pattern per generator: coefficient of z^(r-λ) at
    // x^(aλ) y^(bλ). A generator of order > r contributing to the vertex
    // pins it: no z-substitution removes those terms.
    let mut patterns: Vec<(K, Vec<K>)> = Vec::new(); // (b_00r, c[λ] for λ=1..r)
    for g in gens {
        let ord = match g.order() {
            Ord3::Finite(o) => o,
            _ => continue,
        };
        let mut c = vec![field.zero(); r as usize + 1];
        let mut touches = false;
        for (m, k) in &g.terms {
            let zk = m.get(2);
            if zk >= r {
                continue;
            }
            let lam = r - zk;
            if m.get(0) == a * lam && m.get(1) == b * lam {
                c[lam as usize] = k.clone();
                touches = true;
            }
        }
        if ord > r {
            if touches {
                return Ok(VertexStatus::Prepared);
            }
            continue;
        }
        let lead = g.coeff(&[0, 0, r]);
        if lead.is_zero() {
            return Err(Error::Internal(
                "good parameters violated: an order-r generator has no z^r term".into(),
            ));
        }
        patterns.push((lead, c));
    }
    if patterns.is_empty() {
        return Err(Error::Internal("vertex test with no order-r generator".into()));
    }
    match pattern_eta(&field, r, &patterns)? {
        Some(eta) => Ok(VertexStatus::Solvable { eta }),
        None => Ok(VertexStatus::Prepared),
    }
}

/// Joint power-pattern solve: find η ≠ 0 with c[λ] = lead·C(r,λ)·(−η)^λ for
/// every listed (lead, c) pair, i.e. the collected contributions form
/// lead·(v − η·m)^r per generator. A zero lead admits only an empty pattern.
/// The first generator with a nonzero lead pins η; everything else verifies.
pub fn pattern_eta(field: &Field, r: u32, patterns: &[(K, Vec<K>)]) -> Result<Option<K>> {
    for (lead, c) in patterns {
        if lead.is_zero() && c.iter().any(|k| !k.is_zero()) {
            return Ok(None);
        }
    }
    // Solve η from the binomial position λ0 = p^s, which never vanishes mod p.
    let (_, s, ps) = split_p_power(field, r);
    let mut eta: Option<K> = None;
    for (lead, c) in patterns {
        if lead.is_zero() {
            continue;
        }
        let cb = binom_in(field, r as u64, ps as u64);
        debug_assert!(!cb.is_zero());
        let rhs = c[ps as usize].div(&lead.mul(&cb))?;
        let minus_eta = match field {
            Field::Q => rhs,
            Field::Fq(_) => rhs.ps_root(s),
        };
        eta = Some(minus_eta.neg());
        break;
    }
    let Some(eta) = eta else { return Ok(None) };
    if eta.is_zero() {
        return Ok(None);
    }
    for (lead, c) in patterns {
        for lam in 1..=r {
            let required = lead
                .mul(&binom_in(field, r as u64, lam as u64))
                .mul(&eta.neg().pow(lam as u64));
            if c[lam as usize] != required {
                return Ok(None);
            }
        }
    }
    Ok(Some(eta))
}

/// The solvable vertex is lead·(z − ηx^a y^b)^r; moving its approximate root
/// onto z = 0 substitutes z ↦ z + ηx^a y^b.
pub fn vertex_substitution(field: &Field, eta: &K, a: u32, b: u32) -> CoordChange {
    let x = Poly::var(field.clone(), 3, 0);
    let y = Poly::var(field.clone(), 3, 1);
    let z = Poly::var(field.clone(), 3, 2);
    let m = Poly::monomial(field.clone(), 3, &[a, b, 0], eta.clone());
    CoordChange { images: vec![x, y, z.add(&m)] }
}

/// y ← y − η x^n as a recorded coordinate change.
pub fn y_translation(field: &Field, eta: &K, n: u32) -> CoordChange {
    let x = Poly::var(field.clone(), 3, 0);
    let y = Poly::var(field.clone(), 3, 1);
    let z = Poly::var(field.clone(), 3, 2);
    let m = Poly::monomial(field.clone(), 3, &[n, 0, 0], eta.clone());
    CoordChange { images: vec![x, y.sub(&m), z] }
}

#[derive(Debug, Clone)]
pub struct WellPrepared {
    pub gens: Vec<Poly>,
    pub steps: Vec<CoordChange>,
    pub polygon: Polygon,
}

/// Remove solvable vertices until none remain (or the step budget runs out).
/// Each removal certificate (vertex, η) is recorded via the returned steps;
/// new vertices may appear after a removal, which is why this is budgeted.
pub fn well_prepare(gens: &[Poly], r: u32, budget: &mut u32) -> Result<WellPrepared> {
    let mut gens = gens.to_vec();
    let mut steps = Vec::new();
    loop {
        let polygon = build_delta(&gens, r)?;
        let mut acted = false;
        for v in polygon.vertices.clone() {
            match vertex_test(&gens, r, &v)? {
                VertexStatus::Prepared => {}
                VertexStatus::Solvable { eta } => {
                    if *budget == 0 {
                        return Err(Error::Budget(
                            "preparation step budget exhausted".into(),
                        ));
                    }
                    *budget -= 1;
                    let a = as_integer(&v.0).unwrap();
                    let b = as_integer(&v.1).unwrap();
                    let ch = vertex_substitution(&gens[0].field, &eta, a, b);
                    gens = ch.apply(&gens)?;
                    let after = build_delta(&gens, r)?;
                    if after.points.contains(&v) {
                        return Err(Error::Internal(
                            "vertex survived its own preparation".into(),
                        ));
                    }
                    steps.push(ch);
                    acted = true;
                    break;
                }
            }
        }
        if !acted {
            return Ok(WellPrepared { gens, steps, polygon });
        }
    }
}

// ------------------------------------------------ translation candidates

/// Vanishing conditions for sliding moves y ← y − η x^n: for every generator
/// slice at z-exponent k, every lattice position on the line a + n·b = c with
/// b ≤ bottom must end up with coefficient zero. Each position contributes a
/// polynomial in η; the translations that raise the bottom of the line are
/// exactly the common roots.
fn slide_vanish_polys(
    gens: &[Poly],
    r: u32,
    n: u32,
    line_c: &Rat,
    bottom: &Rat,
) -> Vec<UPoly> {
    let field = gens[0].field.clone();
    let mut out = Vec::new();
    for g in gens {
        for k in 0..r {
            let er = r - k;
            let m_line = line_c * BigRational::from_integer(er.into());
            let Some(m_line) = as_integer(&m_line) else {
                continue;
            };
            let jb = bottom * BigRational::from_integer(er.into());
            let j_max = jb.floor().to_integer().to_i64().unwrap_or(-1);
            if j_max < 0 {
                continue;
            }
            for jt in 0..=j_max as u32 {
                if (jt * n) > m_line {
                    continue;
                }
                // φ(η) = Σ_{terms x^i y^j z^k, i + n j = m_line, j ≥ jt}
                //        coeff · C(j, j − jt) · (−η)^(j − jt)
                let mut coeffs: Vec<K> = Vec::new();
                let mut any = false;
                for (m, c) in &g.terms {
                    if m.get(2) != k {
                        continue;
                    }
                    let (i, j) = (m.get(0), m.get(1));
                    if i + n * j != m_line || j < jt {
                        continue;
                    }
                    let e = (j - jt) as usize;
                    if coeffs.len() <= e {
                        coeffs.resize(e + 1, field.zero());
                    }
                    let cb = binom_in(&field, j as u64, (j - jt) as u64);
                    let signed = cb.mul(&neg_one_pow(&field, j - jt));
                    coeffs[e] = coeffs[e].add(&c.mul(&signed));
                    any = true;
                }
                if any {
                    out.push(UPoly::new(field.clone(), coeffs));
                }
            }
        }
    }
    out
}

/// Nonzero η that vanish on every slide condition; the bool is false when a
/// root search over Q could not be certified complete.
fn translation_candidates(
    gens: &[Poly],
    r: u32,
    n: u32,
    line_c: &Rat,
    bottom: &Rat,
) -> Result<(Vec<K>, bool)> {
    let polys = slide_vanish_polys(gens, r, n, line_c, bottom);
    if polys.is_empty() {
        return Ok((vec![], true));
    }
    let mut g = polys[0].clone();
    for p in &polys[1..] {
        g = g.gcd(p)?;
        if g.deg() == Some(0) {
            return Ok((vec![], true));
        }
    }
    if g.is_zero() {
        return Err(Error::Internal("degenerate slide system".into()));
    }
    if g.deg() == Some(0) {
        return Ok((vec![], true));
    }
    let (roots, complete) = roots_in_field(&g)?;
    let mut roots: Vec<K> = roots.into_iter().filter(|k| !k.is_zero()).collect();
    roots.sort_by_key(|k| k.to_string());
    Ok((roots, complete))
}

// ------------------------------------------------ very well preparation

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VwpCase {
    /// The γ-vertex differs from the (α, β) vertex, δ maximal.
    Case1,
    /// Single (bottom) vertex: ε = ∞.
    Case2a,
    /// 1/ε is not an integer.
    Case2b,
    /// 1/ε = n ∈ N and no y ← y − η x^n changes the edge.
    Case2c { n: u32 },
    /// The polygon emptied out: the ideal is contained in (z)^r.
    SurfaceCase,
}

#[derive(Debug, Clone)]
pub struct VeryWellPrepared {
    pub gens: Vec<Poly>,
    pub steps: Vec<CoordChange>,
    pub polygon: Polygon,
    pub inv: Option<Invariants>,
    pub case: VwpCase,
    /// False when some candidate search over Q was not certified complete
    /// (maximality then holds over the finite system actually solved).
    pub exhaustive: bool,
}

/// Very well preparation: well prepare, maximise δ under y ← y − ηx, then
/// classify against the case list, maximising the edge bottom under
/// y ← y − η x^n when 1/ε = n is an integer.
pub fn very_well_prepare(
    gens: &[Poly],
    r: u32,
    budgets: &Budgets,
) -> Result<VeryWellPrepared> {
    let mut gens = gens.to_vec();
    let mut steps: Vec<CoordChange> = Vec::new();
    let mut budget = budgets.max_prep;
    let mut exhaustive = true;
    loop {
        let wp = well_prepare(&gens, r, &mut budget)?;
        gens = wp.gens;
        steps.extend(wp.steps);
        let polygon = wp.polygon;
        if polygon.is_empty() {
            if polygon.known_empty() {
                return Ok(VeryWellPrepared {
                    gens,
                    steps,
                    polygon,
                    inv: None,
                    case: VwpCase::SurfaceCase,
                    exhaustive,
                });
            }
            return Err(Error::Uncertified(
                "polygon empty within certified region only".into(),
            ));
        }
        let inv = polygon.invariants()?;

        // Maximise δ by n = 1 translations.
        let (cands, complete) =
            translation_candidates(&gens, r, 1, &inv.gamma, &inv.delta)?;
        exhaustive &= complete;
        let mut improved = false;
        for eta in cands {
            if budget == 0 {
                return Err(Error::Budget("translation budget exhausted".into()));
            }
            let ch = y_translation(&gens[0].field, &eta, 1);
            let trial = ch.apply(&gens)?;
            let mut trial_budget = budget;
            let twp = well_prepare(&trial, r, &mut trial_budget)?;
            if twp.polygon.is_empty() {
                budget = trial_budget.saturating_sub(1);
                gens = twp.gens;
                steps.push(ch);
                steps.extend(twp.steps);
                improved = true;
                break;
            }
            let tinv = twp.polygon.invariants()?;
            if tinv.delta > inv.delta {
                budget = trial_budget.saturating_sub(1);
                gens = twp.gens;
                steps.push(ch);
                steps.extend(twp.steps);
                improved = true;
                break;
            }
        }
        if improved {
            continue;
        }

        // δ is maximal; classify.
        let gamma_vertex = (&inv.gamma - &inv.delta, inv.delta.clone());
        if gamma_vertex != (inv.alpha.clone(), inv.beta.clone()) {
            return Ok(VeryWellPrepared {
                gens,
                steps,
                polygon,
                inv: Some(inv),
                case: VwpCase::Case1,
                exhaustive,
            });
        }
        let Some(eps) = inv.eps.clone() else {
            return Ok(VeryWellPrepared {
                gens,
                steps,
                polygon,
                inv: Some(inv),
                case: VwpCase::Case2a,
                exhaustive,
            });
        };
        let inv_eps = eps.recip();
        let Some(n) = as_integer(&inv_eps) else {
            return Ok(VeryWellPrepared {
                gens,
                steps,
                polygon,
                inv: Some(inv),
                case: VwpCase::Case2b,
                exhaustive,
            });
        };
        // Case 2c candidate moves along the ε-edge: line a + n b = α + n β,
        // bottom at the next vertex.
        let enb = &inv.alpha + BigRational::from_integer(n.into()) * &inv.beta;
        let next_vertex = polygon
            .vertices
            .iter()
            .filter(|(a, _)| *a > inv.alpha)
            .find(|(a, b)| {
                a + BigRational::from_integer(n.into()) * b == enb
            })
            .cloned();
        let bottom = match next_vertex {
            Some((_, b)) => b,
            None => {
                // no second vertex on the line: the edge is degenerate
                return Ok(VeryWellPrepared {
                    gens,
                    steps,
                    polygon,
                    inv: Some(inv),
                    case: VwpCase::Case2c { n },
                    exhaustive,
                });
            }
        };
        let (cands, complete) = translation_candidates(&gens, r, n, &enb, &bottom)?;
        exhaustive &= complete;
        let mut acted = false;
        for eta in cands {
            if budget == 0 {
                return Err(Error::Budget("translation budget exhausted".into()));
            }
            let ch = y_translation(&gens[0].field, &eta, n);
            let trial = ch.apply(&gens)?;
            let mut trial_budget = budget;
            let twp = well_prepare(&trial, r, &mut trial_budget)?;
            let changed = if twp.polygon.is_empty() {
                true
            } else {
                let tinv = twp.polygon.invariants()?;
                tinv.eps != inv.eps
                    || twp
                        .polygon
                        .vertices
                        .iter()
                        .filter(|(a, _)| *a > tinv.alpha)
                        .find(|(a, b)| {
                            a + BigRational::from_integer(n.into()) * b == enb
                        })
                        .map(|(_, b)| *b > bottom)
                        .unwrap_or(true)
            };
            if changed {
                budget = trial_budget.saturating_sub(1);
                gens = twp.gens;
                steps.push(ch);
                steps.extend(twp.steps);
                acted = true;
                break;
            }
        }
        if acted {
            continue;
        }
        return Ok(VeryWellPrepared {
            gens,
            steps,
            polygon,
            inv: Some(inv),
            case: VwpCase::Case2c { n },
            exhaustive,
        });
    }
}

// ------------------------------------------------ τ = 2 solvability

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tau2Status {
    NotSolvable,
    /// Recentering x ← x − α z^γ, y ← y − β z^γ reproduces the weighted
    /// initial form, so the invariant is not yet honest at these parameters.
    Solvable { ca: K, cb: K },
}

/// The weighted initial form of g: terms with (i + j)·γ + k = r·γ.
pub fn tau2_bracket(g: &Poly, r: u32, gamma: &Rat) -> Poly {
    let mut out = Poly::zero(g.field.clone(), 3);
    let rg = gamma * BigRational::from_integer(r.into());
    for (m, c) in &g.terms {
        let w = gamma * BigRational::from_integer((m.get(0) + m.get(1)).into())
            + BigRational::from_integer(m.get(2).into());
        if w == rg {
            out.terms.insert(m.clone(), c.clone());
        }
    }
    out
}

/// Solvability of the τ = 2 configuration at weight γ: γ ∈ N and some
/// recentering by (α, β)·z^γ turns every bracket into the pure leading form.
pub fn tau2_solvable(gens: &[Poly], r: u32, gamma: &Rat) -> Result<Tau2Status> {
    let field = gens[0].field.clone();
    let Some(gn) = as_integer(gamma) else {
        return Ok(Tau2Status::NotSolvable);
    };
    if gn == 0 {
        return Ok(Tau2Status::NotSolvable);
    }
    let order_r: Vec<&Poly> = gens
        .iter()
        .filter(|g| g.order() == Ord3::Finite(r))
        .collect();
    if order_r.is_empty() {
        return Err(Error::Internal("τ=2 test with no order-r generator".into()));
    }

    let check = |ca: &K, cb: &K| -> Result<bool> {
        for g in &order_r {
            let lf = g.leading_form(r)?;
            let x = Poly::var(field.clone(), 3, 0);
            let y = Poly::var(field.clone(), 3, 1);
            let zg = Poly::monomial(field.clone(), 3, &[0, 0, gn], field.one());
            let images = vec![
                x.sub(&zg.scale(ca)),
                y.sub(&zg.scale(cb)),
                Poly::var(field.clone(), 3, 2),
            ];
            let target = lf.substitute(&images)?;
            if target != tau2_bracket(g, r, gamma) {
                return Ok(false);
            }
        }
        Ok(true)
    };

    match &field {
        Field::Fq(_) => {
            for ca in field.elements()? {
                for cb in field.elements()? {
                    if ca.is_zero() && cb.is_zero() {
                        continue;
                    }
                    if check(&ca, &cb)? {
                        return Ok(Tau2Status::Solvable { ca, cb });
                    }
                }
            }
            Ok(Tau2Status::NotSolvable)
        }
        Field::Q => {
            // Linear solve from the first-order slices: for each generator,
            // the z^γ-weight-one part of its bracket must equal
            // −(α L_x + β L_y); stack the systems over all generators.
            let mut rows: Vec<Vec<K>> = Vec::new();
            let mut rhs: Vec<K> = Vec::new();
            for g in &order_r {
                let lf = g.leading_form(r)?;
                let lx = lf.hasse(0, 1)?;
                let ly = lf.hasse(1, 1)?;
                // slice: bracket terms with i + j = r − 1 (hence k = γ)
                let bracket = tau2_bracket(g, r, gamma);
                let mut slice = Poly::zero(field.clone(), 3);
                for (m, c) in &bracket.terms {
                    if m.get(0) + m.get(1) == r - 1 {
                        slice
                            .terms
                            .insert(Mono::from_exps(&[m.get(0), m.get(1), 0]), c.clone());
                    }
                }
                let mut monos: Vec<Mono> = Vec::new();
                for f in [&lx, &ly, &slice] {
                    for m in f.terms.keys() {
                        if !monos.contains(m) {
                            monos.push(m.clone());
                        }
                    }
                }
                for m in &monos {
                    rows.push(vec![
                        lx.terms.get(m).cloned().unwrap_or_else(|| field.zero()),
                        ly.terms.get(m).cloned().unwrap_or_else(|| field.zero()),
                    ]);
                    rhs.push(
                        slice
                            .terms
                            .get(m)
                            .cloned()
                            .unwrap_or_else(|| field.zero())
                            .neg(),
                    );
                }
            }
            match crate::algebra::linalg::solve(&field, &rows, &rhs)? {
                Some(sol) => {
                    let (ca, cb) = (sol[0].clone(), sol[1].clone());
                    if ca.is_zero() && cb.is_zero() {
                        return Ok(Tau2Status::NotSolvable);
                    }
                    if check(&ca, &cb)? {
                        Ok(Tau2Status::Solvable { ca, cb })
                    } else {
                        Ok(Tau2Status::NotSolvable)
                    }
                }
                None => Ok(Tau2Status::NotSolvable),
            }
        }
    }
}

// ------------------------------------------------ perfect powers

/// Polynomial division by a divisor monic in `main`: returns (quotient,
/// remainder) with deg_main(remainder) < deg_main(divisor).
pub fn divmod_in_var(f: &Poly, d: &Poly, main: usize) -> Result<(Poly, Poly)> {
    let field = f.field.clone();
    let nvars = f.nvars;
    let dd = d
        .terms
        .keys()
        .map(|m| m.get(main))
        .max()
        .ok_or_else(|| Error::Arithmetic("division by zero".into()))?;
    // monic in main: exactly one term of main-degree dd, with unit coefficient
    let top: Vec<(&Mono, &K)> = d.terms.iter().filter(|(m, _)| m.get(main) == dd).collect();
    if top.len() != 1 || !top[0].0 .0.iter().enumerate().all(|(i, &e)| i == main || e == 0) {
        return Err(Error::Internal("divisor is not monic in the main variable".into()));
    }
    let lead = top[0].1.clone();
    let mut rem = f.clone();
    let mut quot = Poly::zero(field.clone(), nvars);
    quot.trunc = f.trunc;
    loop {
        let Some((m, c)) = rem
            .terms
            .iter()
            .filter(|(m, _)| m.get(main) >= dd)
            .map(|(m, c)| (m.clone(), c.clone()))
            .next()
        else {
            break;
        };
        let mut qm = m.0.clone();
        qm[main] -= dd as u16;
        let qc = c.div(&lead)?;
        let qterm = Poly {
            nvars,
            field: field.clone(),
            terms: [(Mono(qm), qc)].into_iter().collect(),
            trunc: None,
        };
        quot = quot.add(&qterm);
        rem = rem.sub(&qterm.mul(d));
    }
    Ok((quot, rem))
}

/// Decide g = unit · (v − ψ)^r with v the main variable and ψ free of v,
/// and return (ψ, unit quotient). The detection factors r = r0·p^s, takes
/// the Hasse derivative of order r − p^s (which is divisible by
/// v^(p^s) − ψ^(p^s) times a unit), extracts Θ = ψ^(p^s) degree by degree in
/// the other variables, takes p^s-th roots and verifies (v − ψ)^r | g.
pub fn perfect_power_root(g: &Poly, r: u32, main: usize) -> Result<Option<(Poly, Poly)>> {
    if r == 0 {
        return Ok(None);
    }
    let field = g.field.clone();
    let nvars = g.nvars;
    let (_, s, ps) = split_p_power(&field, r);
    let h = g.hasse(main, r - ps)?;

    let codeg = |f: &Poly, d: u32| -> Poly {
        let mut out = Poly::zero(field.clone(), nvars);
        out.trunc = f.trunc;
        for (m, c) in &f.terms {
            let cd: u32 = (0..nvars)
                .filter(|&i| i != main)
                .map(|i| m.get(i))
                .sum();
            if cd == d {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    };
    let z_part = |f: &Poly, j: u32| -> Poly {
        // coefficient of main^j, as a polynomial with main-exponent zero
        let mut out = Poly::zero(field.clone(), nvars);
        for (m, c) in &f.terms {
            if m.get(main) == j {
                let mut e = m.0.clone();
                e[main] = 0;
                out.terms.insert(Mono(e), c.clone());
            }
        }
        out
    };

    // degree-0 layer: must be main^ps times a unit in k[main]
    let h0 = codeg(&h, 0);
    if h0.is_known_zero() {
        return Ok(None);
    }
    let mut div = vec![0u32; nvars];
    div[main] = ps;
    let u0 = match h0.divide_by_mono(&div) {
        Ok(u) => u,
        Err(_) => return Ok(None),
    };
    let c0 = u0.coeff(&vec![0; nvars]);
    if c0.is_zero() {
        return Ok(None);
    }

    let dmax = match (g.trunc, g.degree()) {
        (Some(t), _) => t,
        (None, Some(d)) => d,
        _ => return Ok(None),
    };
    let mut theta = Poly::zero(field.clone(), nvars); // ψ^(p^s), no main var
    let mut u_layers: Vec<Poly> = vec![u0.clone()];
    for d in 1..=dmax {
        // S_d = H_d + Σ_{e=1..d-1} Θ_e · U_{d-e}
        let mut sd = codeg(&h, d);
        for e in 1..d {
            let te = codeg(&theta, e);
            if te.is_known_zero() {
                continue;
            }
            let ul = u_layers.get((d - e) as usize).cloned();
            if let Some(ul) = ul {
                sd = sd.add(&te.mul(&ul));
            }
        }
        // Θ_d from the main^0 slice, then require vanishing below main^ps.
        let s0 = z_part(&sd, 0);
        let theta_d = s0.scale(&c0.inv()?).neg();
        let full = sd.add(&theta_d.mul(&u0));
        for j in 0..ps {
            if !z_part(&full, j).is_known_zero() {
                return Ok(None);
            }
        }
        let ud = match full.divide_by_mono(&div) {
            Ok(u) => u,
            Err(_) => return Ok(None),
        };
        u_layers.push(ud);
        theta = theta.add(&theta_d);
    }

    // ψ = Θ^(1/p^s): exponents divisible by p^s, coefficients via inverse
    // Frobenius (identity over Q where p^s = 1).
    let mut psi = Poly::zero(field.clone(), nvars);
    for (m, c) in &theta.terms {
        if m.0.iter().any(|&e| e as u32 % ps != 0) {
            return Ok(None);
        }
        let root_m = Mono(m.0.iter().map(|&e| e / ps as u16).collect());
        let rc = match &field {
            Field::Q => {
                debug_assert_eq!(ps, 1);
                c.clone()
            }
            Field::Fq(_) => c.ps_root(s),
        };
        psi.terms.insert(root_m, rc);
    }
    if !psi.coeff(&vec![0; nvars]).is_zero() {
        // the branch does not pass through the origin
        return Ok(None);
    }

    // verify: (v − ψ)^r divides g with unit quotient
    let v = Poly::var(field.clone(), nvars, main);
    let factor = v.sub(&psi).pow(r);
    let (q, rem) = divmod_in_var(g, &factor, main)?;
    if !rem.is_known_zero() {
        return Ok(None);
    }
    if q.coeff(&vec![0; nvars]).is_zero() {
        return Ok(None);
    }
    Ok(Some((psi, q)))
}

/// Convenience: print a polygon vertex for error messages.
pub fn vertex_str(v: &(Rat, Rat)) -> String {
    format!("({}, {})", rat_str(&v.0), rat_str(&v.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fq::FqField;
    use crate::algebra::parse::parse_poly;
    use crate::polygon::rat;

    fn q(src: &str) -> Poly {
        parse_poly(src, &["x", "y", "z"], &Field::Q).unwrap()
    }

    fn f2(src: &str) -> Poly {
        let f = Field::Fq(FqField::prime(2).unwrap());
        parse_poly(src, &["x", "y", "z"], &f).unwrap()
    }

    #[test]
    fn vertex_solvable_char_2_but_not_char_0() {
        // z^2 + x^2 y^2: vertex (1,1). Over F_2 it is (z + xy)^2: solvable
        // with η = 1. Over Q the missing cross term xyz forces η = 0.
        let v = (rat(1, 1), rat(1, 1));
        let st = vertex_test(&[f2("z^2 + x^2*y^2")], 2, &v).unwrap();
        let f2f = Field::Fq(FqField::prime(2).unwrap());
        assert_eq!(st, VertexStatus::Solvable { eta: f2f.one() });
        let st = vertex_test(&[q("z^2 + x^2*y^2")], 2, &v).unwrap();
        assert_eq!(st, VertexStatus::Prepared);
        // Over Q with the cross term present it is (z - xy)^2-shaped:
        let st = vertex_test(&[q("z^2 - 2*x*y*z + x^2*y^2")], 2, &v).unwrap();
        assert_eq!(st, VertexStatus::Solvable { eta: Field::Q.one() });
    }

    #[test]
    fn vertex_non_integer_is_prepared() {
        let st = vertex_test(&[q("z^2 - x^3")], 2, &(rat(3, 2), rat(0, 1))).unwrap();
        assert_eq!(st, VertexStatus::Prepared);
    }

    #[test]
    fn well_prepare_removes_and_reveals() {
        // z^2 + x^2 y^2 + x^5 over F_2: (1,1) is solvable; removing it
        // exposes the prepared vertex (5/2, 0).
        let mut budget = 16;
        let wp = well_prepare(&[f2("z^2 + x^2*y^2 + x^5")], 2, &mut budget).unwrap();
        assert_eq!(wp.steps.len(), 1);
        assert_eq!(wp.polygon.vertices, vec![(rat(5, 2), rat(0, 1))]);
        assert_eq!(wp.gens[0], f2("z^2 + x^5"));
    }

    #[test]
    fn well_prepare_removes_char_zero_vertex() {
        // z^2 − 2xyz + x^2y^2 + x^5 = (z − xy)^2 + x^5: the substitution must
        // be z ↦ z + xy, which only differs from z − xy away from char 2.
        let mut budget = 16;
        let wp = well_prepare(&[q("z^2 - 2*x*y*z + x^2*y^2 + x^5")], 2, &mut budget).unwrap();
        assert_eq!(wp.steps.len(), 1);
        assert_eq!(wp.gens[0], q("z^2 + x^5"));
        assert_eq!(wp.polygon.vertices, vec![(rat(5, 2), rat(0, 1))]);
    }

    #[test]
    fn well_prepare_empties_surface_case() {
        let mut budget = 16;
        let wp = well_prepare(&[f2("z^2 + x^2*y^2")], 2, &mut budget).unwrap();
        assert!(wp.polygon.known_empty());
        assert_eq!(wp.gens[0], f2("z^2"));
    }

    #[test]
    fn vwp_case1_two_vertex() {
        let vwp = very_well_prepare(&[q("z^2 + x^3*y + x*y^3")], 2, &Budgets::exact()).unwrap();
        assert_eq!(vwp.case, VwpCase::Case1);
        assert!(vwp.exhaustive);
        let inv = vwp.inv.unwrap();
        assert_eq!(inv.delta, rat(1, 2));
    }

    #[test]
    fn vwp_case2a_whitney() {
        let vwp = very_well_prepare(&[q("z^2 - x^2*y")], 2, &Budgets::exact()).unwrap();
        assert_eq!(vwp.case, VwpCase::Case2a);
    }

    #[test]
    fn vwp_delta_translation() {
        // z^2 - (y - x)^2 x^3: the γ-line bottom moves up after y ← y + ... :
        // generator z^2 - x^3 y^2 + 2 x^4 y - x^5 has γ-line points from the
        // k=0 slice x^3 (y - x)^2; translating y by x collapses the bottom.
        let g = q("z^2 - x^3*y^2 + 2*x^4*y - x^5");
        let vwp = very_well_prepare(&[g], 2, &Budgets::exact()).unwrap();
        // after y ← y - x the slice is x^3 y^2: single vertex at (3/2, 1)
        let inv = vwp.inv.unwrap();
        assert_eq!(inv.delta, rat(1, 1));
        assert_eq!(inv.alpha, rat(3, 2));
        assert!(!vwp.steps.is_empty());
    }

    #[test]
    fn tau2_not_solvable() {
        // non-integer γ
        let st = tau2_solvable(&[q("x^2 + y^2 + z^5")], 2, &rat(5, 2)).unwrap();
        assert_eq!(st, Tau2Status::NotSolvable);
        // integer γ but the z^(2γ)-coefficient breaks the pattern
        let st = tau2_solvable(&[q("x^2 + y^2 + x*z^3 + z^6")], 2, &rat(3, 1)).unwrap();
        assert_eq!(st, Tau2Status::NotSolvable);
    }

    #[test]
    fn tau2_solvable_shifted() {
        // (x - z^3)^2 + y^2: recentering x ← x − z^3 reproduces the leading
        // form, so the datum is solvable at γ = 3 with (α, β) = (1, 0).
        let st = tau2_solvable(&[q("x^2 + y^2 - 2*x*z^3 + z^6")], 2, &rat(3, 1)).unwrap();
        match st {
            Tau2Status::Solvable { ca, cb } => {
                assert_eq!(ca, Field::Q.one());
                assert!(cb.is_zero());
            }
            other => panic!("expected solvable, got {:?}", other),
        }
    }

    #[test]
    fn tau2_solvable_char_3_frobenius() {
        // over F_3: x^3 + (y - z^2)^3 = x^3 + y^3 - z^6 at r = 3, γ = 2;
        // the first-order slice vanishes (cube), so only the full pattern
        // check can find the recentering.
        let f3 = Field::Fq(FqField::prime(3).unwrap());
        let g = parse_poly("x^3 + y^3 - z^6", &["x", "y", "z"], &f3).unwrap();
        let st = tau2_solvable(&[g], 3, &rat(2, 1)).unwrap();
        match st {
            Tau2Status::Solvable { ca, cb } => {
                assert!(ca.is_zero());
                assert_eq!(cb, f3.one());
            }
            other => panic!("expected solvable, got {:?}", other),
        }
    }

    #[test]
    fn perfect_power_extraction() {
        // g = (z - x^2 - xy)^2 (1 + x)
        let base = q("z - x^2 - x*y");
        let unit = q("1 + x");
        let g = base.pow(2).mul(&unit);
        let (psi, quot) = perfect_power_root(&g, 2, 2).unwrap().unwrap();
        assert_eq!(psi, q("x^2 + x*y"));
        assert_eq!(quot, unit);
        // and a non-power is rejected
        assert!(perfect_power_root(&q("z^2 - x^3"), 2, 2).unwrap().is_none());
    }

    #[test]
    fn perfect_power_char_2_fourth_power() {
        let g = f2("z + x^3").pow(4);
        let (psi, quot) = perfect_power_root(&g, 4, 2).unwrap().unwrap();
        assert_eq!(psi, f2("x^3").neg());
        assert_eq!(quot, f2("1"));
    }

    #[test]
    fn divmod_in_var_exactness() {
        let f = q("z^3 - x^2*z + x*y");
        let d = q("z - x");
        let (qq, rem) = divmod_in_var(&f, &d, 2).unwrap();
        assert_eq!(qq.mul(&d).add(&rem), f);
        assert!(rem.terms.keys().all(|m| m.get(2) == 0));
    }
}
