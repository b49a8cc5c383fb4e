//! The plane machine: resolving an ideal in a two-variable chart by point
//! blow-ups, descending on the polygon minimum δ.
//!
//! At an origin of order r the chart is brought to good parameters (some
//! leading form carries yʳ), solvable fronts are translated away, and then
//! either the whole ideal sits in (yʳ) — the r-fold curve splits off — or
//! the origin is blown up. The transform law for the polygon gives
//! δ₁ = δ − 1 exactly on the chain of origins, which is asserted and
//! recorded as a descent path.

use std::collections::VecDeque;

use num::One;

use crate::algebra::unipoly::{roots_in_field, UPoly};
use crate::algebra::{Field, K, Poly};
use crate::blowup::{sing_on_coordinate_line, transform_divisors, weak_transform, DivisorRecord};
use crate::groebner;
use crate::polygon::{delta_2d, rat_str, rat_u, Rat};
use crate::prepare::pattern_eta;
use crate::resolver::{embed_divisors, embed_gens, ideal_order, outcome_of_error, ResolveOptions};
use crate::singular::{nu_at_point, sing_ideal, CoordChange};
use crate::trace::{
    coord_change_json, divisors_json, poly_str, DescentPath, FieldJson, JobMeta, Outcome, Trace,
    TraceNode, TRACE_VERSION,
};
use crate::{Error, Result};

pub const VARS2: [&str; 2] = ["x", "y"];

fn v(field: &Field, i: usize) -> Poly {
    Poly::var(field.clone(), 2, i)
}

fn consts(field: &Field, k: &K) -> Poly {
    Poly::monomial(field.clone(), 2, &[0, 0], k.clone())
}

/// x ← x + t·y; the new yʳ coefficient of a leading form L is L(t, 1).
fn shear_2d(field: &Field, t: &K) -> CoordChange {
    CoordChange { images: vec![v(field, 0).add(&v(field, 1).scale(t)), v(field, 1)] }
}

fn swap_2d(field: &Field) -> CoordChange {
    CoordChange { images: vec![v(field, 1), v(field, 0)] }
}

/// The solvable front is lead·(y − ηxⁿ)ʳ; moving the approximate root onto
/// y = 0 substitutes y ↦ y + ηxⁿ.
pub fn front_translation_2d(field: &Field, eta: &K, n: u32) -> CoordChange {
    let m = Poly::monomial(field.clone(), 2, &[n, 0], eta.clone());
    CoordChange { images: vec![v(field, 0), v(field, 1).add(&m)] }
}

fn as_int(r: &Rat) -> Option<u32> {
    use num::{Signed, ToPrimitive};
    if r.denom().is_one() && !r.numer().is_negative() {
        r.numer().to_u32()
    } else {
        None
    }
}

/// Arrange that some generator of order r has a nonzero yʳ coefficient.
/// Over Q a shear always exists; over a small F_q every rational shear and
/// the swap can miss, in which case an extension is required.
pub fn good_params_2d(gens: &[Poly], r: u32) -> Result<(Vec<Poly>, Vec<CoordChange>)> {
    let field = gens[0].field.clone();
    let has = |gs: &[Poly]| gs.iter().any(|g| !g.coeff(&[0, r]).is_zero());
    if has(gens) {
        return Ok((gens.to_vec(), vec![]));
    }
    let mut lfs = Vec::new();
    for g in gens {
        if g.order() == crate::algebra::Ord3::Finite(r) {
            lfs.push(g.leading_form(r)?);
        }
    }
    if lfs.is_empty() {
        return Err(Error::Internal("no generator realises the minimal order".into()));
    }
    let cands: Vec<K> = match &field {
        Field::Q => (1..=r as i64 + 1).map(|t| field.from_i64(t)).collect(),
        Field::Fq(_) => field.elements()?.into_iter().filter(|k| !k.is_zero()).collect(),
    };
    for t in &cands {
        let pt = [t.clone(), field.one()];
        if lfs.iter().any(|l| !l.eval(&pt).is_zero()) {
            let step = shear_2d(&field, t);
            let out = step.apply(gens)?;
            debug_assert!(has(&out));
            return Ok((out, vec![step]));
        }
    }
    if lfs.iter().any(|l| !l.coeff(&[r, 0]).is_zero()) {
        let step = swap_2d(&field);
        return Ok((step.apply(gens)?, vec![step]));
    }
    Err(Error::ExtensionNeeded(
        "every shear parameter in the base field misses the leading forms".into(),
    ))
}

/// δ from the visible terms, checked against the truncation bound so that an
/// invisible term could not undercut it. Invisible terms (i, j) satisfy
/// i + j > t, hence i/(r−j) > (t+1−j)/(r−j) ≥ (t+1)/r.
fn certified_delta_2d(gens: &[Poly], r: u32) -> Result<Option<Rat>> {
    let d = delta_2d(gens, r);
    let tr = gens.iter().filter_map(|g| g.trunc).min();
    if let (Some(d), Some(t)) = (&d, tr) {
        if t + 1 < r {
            return Err(Error::Truncation("truncation below the order".into()));
        }
        if *d > rat_u(t + 1, r) {
            return Err(Error::Truncation(
                "δ is not certified at this truncation bound".into(),
            ));
        }
    }
    Ok(d)
}

/// Solvability of the δ-front: when δ = n is an integer and the whole front
/// is lead·(y − ηxⁿ)ʳ, return η.
fn front_eta(gens: &[Poly], r: u32, delta: &Rat) -> Result<Option<K>> {
    let field = gens[0].field.clone();
    let Some(n) = as_int(delta) else { return Ok(None) };
    if n == 0 {
        return Err(Error::Internal("δ = 0 at an r-fold origin".into()));
    }
    let mut pats = Vec::new();
    for g in gens {
        let lead = g.coeff(&[0, r]);
        let mut c = vec![field.zero(); r as usize + 1];
        for (m, k) in &g.terms {
            let j = m.get(1);
            if j < r {
                let lam = r - j;
                if m.get(0) == n * lam {
                    c[lam as usize] = k.clone();
                }
            }
        }
        pats.push((lead, c));
    }
    pattern_eta(&field, r, &pats)
}

#[derive(Debug, Clone)]
pub struct PlanePrep {
    pub gens: Vec<Poly>,
    pub steps: Vec<CoordChange>,
    /// None encodes δ = ∞: the ideal sits inside (yʳ).
    pub delta: Option<Rat>,
}

/// Translate solvable fronts away until δ is intrinsic.
pub fn prepare_2d(gens: &[Poly], r: u32, budget: &mut u32) -> Result<PlanePrep> {
    let field = gens[0].field.clone();
    let mut gens = gens.to_vec();
    let mut steps = Vec::new();
    loop {
        let Some(d) = certified_delta_2d(&gens, r)? else {
            return Ok(PlanePrep { gens, steps, delta: None });
        };
        let Some(eta) = front_eta(&gens, r, &d)? else {
            return Ok(PlanePrep { gens, steps, delta: Some(d) });
        };
        if *budget == 0 {
            return Err(Error::Budget(
                "translation budget exhausted while preparing the plane front".into(),
            ));
        }
        *budget -= 1;
        let n = as_int(&d).expect("solvable front has integer δ");
        let step = front_translation_2d(&field, &eta, n);
        gens = step.apply(&gens)?;
        steps.push(step);
        if let Some(d2) = certified_delta_2d(&gens, r)? {
            if d2 <= d {
                return Err(Error::Internal("front survived its own translation".into()));
            }
        }
    }
}

/// One move against a one-dimensional singular locus: divide out an r-fold
/// coordinate axis, or recenter a shifted rational line onto an axis first.
enum OneDim {
    Divide { var: usize, t: u32 },
    Recenter { var: usize, c: K },
}

fn gcd_all(ps: &[UPoly]) -> Result<Option<UPoly>> {
    let mut acc: Option<UPoly> = None;
    for p in ps {
        if p.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => p.clone(),
            Some(prev) => prev.gcd(p)?,
        });
    }
    Ok(acc)
}

/// Generators of the singular ideal as univariate polynomials in `keep`.
fn eliminate_to_var(gens: &[Poly], keep: usize) -> Result<Vec<UPoly>> {
    let field = gens[0].field.clone();
    let work: Vec<Poly> = if keep == 1 {
        gens.to_vec()
    } else {
        swap_2d(&field).apply(gens)?
    };
    let eliminated = groebner::eliminate(&work, 1)?;
    eliminated.iter().map(|g| g.to_unipoly(1)).collect()
}

fn one_dim_move(gens: &[Poly]) -> Result<Option<OneDim>> {
    let sing = sing_ideal(gens, 2)?;
    if groebner::dimension(&sing)? <= 0 {
        return Ok(None);
    }
    // an axis inside the singular locus forces every generator into (var)²
    for var in [1usize, 0] {
        let t = gens.iter().filter_map(|g| g.ord_along(&[var])).min().unwrap_or(0);
        if t >= 2 {
            return Ok(Some(OneDim::Divide { var, t }));
        }
    }
    // a shifted line x = c (or y = c): c is a common root of the elimination
    // ideal, and recentering must put the whole ideal inside (var)²
    let field = gens[0].field.clone();
    for var in [0usize, 1] {
        let uni = eliminate_to_var(&sing, var)?;
        let Some(u) = gcd_all(&uni)? else { continue };
        if u.deg().map(|d| d == 0).unwrap_or(true) {
            continue;
        }
        let (roots, _) = roots_in_field(&u)?;
        for c in roots {
            if c.is_zero() {
                continue;
            }
            let mut images = vec![v(&field, 0), v(&field, 1)];
            images[var] = images[var].add(&consts(&field, &c));
            let moved = CoordChange { images }.apply(gens)?;
            let t = moved.iter().filter_map(|g| g.ord_along(&[var])).min().unwrap_or(0);
            if t >= 2 {
                return Ok(Some(OneDim::Recenter { var, c }));
            }
        }
    }
    Err(Error::Unsupported(
        "the singular locus contains a curve that is not a rational coordinate line".into(),
    ))
}

/// All rational singular points of the chart, with a defect description when
/// irrational ones provably exist. Projections are taken by elimination, so
/// the completeness statement covers the algebraic closure.
fn find_sing_points_2d(gens: &[Poly]) -> Result<(Vec<[K; 2]>, Option<(usize, String)>)> {
    let field = gens[0].field.clone();
    let sing = sing_ideal(gens, 2)?;
    if groebner::dimension(&sing)? < 0 {
        return Ok((vec![], None));
    }
    let uni = eliminate_to_var(&sing, 1)?;
    let Some(uy) = gcd_all(&uni)? else {
        return Err(Error::Internal("a zero-dimensional locus with free y-projection".into()));
    };
    let (yroots, _) = roots_in_field(&uy)?;
    let mut defect: Option<(usize, String)> = None;
    let mut rest = uy.clone();
    for b in &yroots {
        while rest.eval(b).is_zero() && rest.deg().unwrap_or(0) > 0 {
            rest = rest.deflate(b);
        }
    }
    if rest.deg().unwrap_or(0) > 0 {
        defect = Some((
            rest.deg().unwrap(),
            "singular points with irrational y-coordinate".into(),
        ));
    }
    let mut pts = Vec::new();
    for b in yroots {
        let images = vec![v(&field, 0), consts(&field, &b)];
        let mut slices = Vec::new();
        for s in &sing {
            let sub = s.substitute(&images)?;
            slices.push(sub.to_unipoly(0)?);
        }
        let Some(ux) = gcd_all(&slices)? else {
            return Err(Error::Internal("a singular fibre line escaped the dimension check".into()));
        };
        let (xroots, _) = roots_in_field(&ux)?;
        let mut rest = ux.clone();
        for a in &xroots {
            while rest.eval(a).is_zero() && rest.deg().unwrap_or(0) > 0 {
                rest = rest.deflate(a);
            }
        }
        if rest.deg().unwrap_or(0) > 0 && defect.is_none() {
            defect = Some((
                rest.deg().unwrap(),
                "singular points with irrational x-coordinate".into(),
            ));
        }
        for a in xroots {
            let pt = [a.clone(), b.clone()];
            if !nu_at_point(gens, &pt)?.at_least(2) {
                return Err(Error::Internal(
                    "vanishing of the derivative ideal did not certify the order".into(),
                ));
            }
            pts.push(pt);
        }
    }
    pts.sort_by_key(|p| (p[0].to_string(), p[1].to_string()));
    Ok((pts, defect))
}

struct St {
    nodes: Vec<TraceNode>,
    paths: Vec<DescentPath>,
    queue: VecDeque<Item>,
}

impl St {
    /// Children record their creation-time field: the parent chart may extend
    /// its own base afterwards, and replay must not inherit that.
    fn child(
        &mut self,
        parent: usize,
        substitution: Vec<String>,
        divided: Option<u32>,
        field: &Field,
    ) -> usize {
        let id = self.nodes.len();
        let mut n = TraceNode::skeleton(id, Some(parent));
        n.substitution = substitution;
        n.divided = divided;
        n.field = Some(FieldJson::of(field));
        self.nodes.push(n);
        id
    }
}

#[derive(Clone)]
struct Chain {
    path: usize,
    r: u32,
    delta: Rat,
}

struct Item {
    node: usize,
    gens: Vec<Poly>,
    div: DivisorRecord,
    field: Field,
    depth: u32,
    /// Root-like charts scan globally for singular points; blow-up children
    /// only own their origin and exceptional fibre.
    global: bool,
    chain: Option<Chain>,
}

/// Resolve a two-variable chart. The trace always comes back; failures are
/// folded into its outcome.
pub fn resolve_2d(gens: &[Poly], divisors: &DivisorRecord, opts: &ResolveOptions) -> Result<Trace> {
    if gens.is_empty() {
        return Err(Error::Parse("empty generator list".into()));
    }
    for g in gens {
        if g.nvars != 2 {
            return Err(Error::Parse("the plane machine expects two variables".into()));
        }
    }
    let field = gens[0].field.clone();
    let job = JobMeta {
        field: FieldJson::of(&field),
        vars: VARS2.iter().map(|s| s.to_string()).collect(),
        generators: gens.iter().map(|g| poly_str(g, &VARS2)).collect(),
        mode: "resolve-2d".into(),
        trunc: gens.iter().filter_map(|g| g.trunc).min(),
    };
    let mut st = St { nodes: vec![TraceNode::skeleton(0, None)], paths: vec![], queue: VecDeque::new() };
    st.queue.push_back(Item {
        node: 0,
        gens: gens.to_vec(),
        div: divisors.clone(),
        field,
        depth: 0,
        global: true,
        chain: None,
    });
    let mut outcome = Outcome::Success;
    while let Some(item) = st.queue.pop_front() {
        let node = item.node;
        if let Err(e) = step_2d(&mut st, item, opts) {
            st.nodes[node].status = format!("error: {e}");
            outcome = outcome_of_error(&e);
            break;
        }
    }
    Ok(Trace { version: TRACE_VERSION, job, nodes: st.nodes, paths: st.paths, outcome })
}

fn reset_node(n: &mut TraceNode, birth_certs: &std::collections::BTreeMap<String, String>) {
    n.preps.clear();
    n.generators.clear();
    n.certificates = birth_certs.clone();
    n.polygon = None;
    n.nu = String::new();
}

fn step_2d(st: &mut St, item: Item, opts: &ResolveOptions) -> Result<()> {
    let Item { node, gens: gens0, div: div0, field: field0, depth, global, chain } = item;
    if depth > opts.budgets.max_depth {
        return Err(Error::Budget("the blow-up depth budget is exhausted".into()));
    }
    let mut gens = gens0;
    let mut div = div0;
    let mut field = field0;
    let mut ext_rounds = 0u32;
    // a defect-free scan is complete over the closure, so never rerun it
    // after a later extension: the children are already queued
    let mut scanned = false;
    let birth_certs = st.nodes[node].certificates.clone();

    // a retry of the whole chart happens only after a field extension
    'chart: loop {
        reset_node(&mut st.nodes[node], &birth_certs);
        st.nodes[node].divisors = divisors_json(&div, &VARS2);
        st.nodes[node].trunc = gens.iter().filter_map(|g| g.trunc).min();
        let ord = ideal_order(&gens)?;
        st.nodes[node].nu = ord.to_string();

        // a one-dimensional singular locus is divided away before any
        // point-centered move
        match one_dim_move(&gens) {
            Ok(None) => {}
            Ok(Some(OneDim::Divide { var, t })) => {
                let mut exps = [0u32; 2];
                exps[var] = t;
                let quot = gens
                    .iter()
                    .map(|g| g.divide_by_mono(&exps))
                    .collect::<Result<Vec<_>>>()?;
                let axis = v(&field, var);
                div.push_minus(axis.clone(), t);
                let child = st.child(node, vec![], None, &field);
                let label = format!("({})^{}", poly_str(&axis, &VARS2), t);
                st.nodes[child].certificates.insert("divided-by".into(), label.clone());
                st.nodes[node].generators = gens.iter().map(|g| poly_str(g, &VARS2)).collect();
                st.nodes[node].certificates.insert("curve-division".into(), label);
                st.nodes[node].status = "divided".into();
                st.queue.push_back(Item {
                    node: child,
                    gens: quot,
                    div,
                    field,
                    depth: depth + 1,
                    global,
                    chain: None,
                });
                return Ok(());
            }
            Ok(Some(OneDim::Recenter { var, c })) => {
                let mut images = vec![v(&field, 0), v(&field, 1)];
                images[var] = images[var].add(&consts(&field, &c));
                let cc = CoordChange { images };
                let moved = cc.apply(&gens)?;
                let mdiv = div.map(&cc.images)?;
                let child = st.child(node, coord_change_json(&cc, &VARS2), None, &field);
                st.nodes[child].certificates.insert("recenter".into(), c.to_string());
                st.nodes[node].generators = gens.iter().map(|g| poly_str(g, &VARS2)).collect();
                st.nodes[node].status = "recentered".into();
                st.queue.push_back(Item {
                    node: child,
                    gens: moved,
                    div: mdiv,
                    field,
                    depth: depth + 1,
                    global,
                    chain: None,
                });
                return Ok(());
            }
            Err(e) => return Err(e),
        }

        // root-like charts position every rational singular point; blow-up
        // children cover their fibre below instead
        if global && !scanned {
            let (pts, defect) = find_sing_points_2d(&gens)?;
            if let Some((deg, why)) = defect {
                match extension(&field, opts, deg, &why)? {
                    Some(big) => {
                        ext_rounds += 1;
                        if ext_rounds > 3 {
                            return Err(Error::Budget("too many base extensions on one chart".into()));
                        }
                        gens = embed_gens(&gens, &big)?;
                        div = embed_divisors(&div, &big)?;
                        field = big;
                        st.nodes[node].field = Some(FieldJson::of(&field));
                        continue 'chart;
                    }
                    None => unreachable!(),
                }
            }
            scanned = true;
            for p in pts {
                if p.iter().all(|k| k.is_zero()) {
                    continue;
                }
                let images = vec![
                    v(&field, 0).add(&consts(&field, &p[0])),
                    v(&field, 1).add(&consts(&field, &p[1])),
                ];
                let cc = CoordChange { images };
                let moved = cc.apply(&gens)?;
                let mdiv = div.map(&cc.images)?;
                let child = st.child(node, coord_change_json(&cc, &VARS2), None, &field);
                st.nodes[child]
                    .certificates
                    .insert("recenter".into(), format!("({}, {})", p[0], p[1]));
                st.queue.push_back(Item {
                    node: child,
                    gens: moved,
                    div: mdiv,
                    field: field.clone(),
                    depth: depth + 1,
                    global: false,
                    chain: None,
                });
            }
        }

        // the origin machine
        if ord <= 1 {
            st.nodes[node].generators = gens.iter().map(|g| poly_str(g, &VARS2)).collect();
            st.nodes[node].certificates.insert("origin-order".into(), ord.to_string());
            if st.nodes[node].status == "open" {
                st.nodes[node].status = "resolved".into();
            }
            return Ok(());
        }
        let r = ord;

        // δ-descent law against the parent, on the incoming generators
        let mut extend_path: Option<usize> = None;
        if let Some(ch) = &chain {
            if ch.r == r {
                let raw = certified_delta_2d(&gens, r)?;
                let expected = ch.delta.clone() - Rat::one();
                if raw.as_ref() != Some(&expected) {
                    return Err(Error::Internal(
                        "the polygon minimum failed to drop by one along the chain".into(),
                    ));
                }
                st.nodes[node].certificates.insert("delta-raw".into(), rat_str(&expected));
                extend_path = Some(ch.path);
            }
        }

        // good parameters and preparation
        let (g1, mut steps) = match good_params_2d(&gens, r) {
            Ok(ok) => ok,
            Err(Error::ExtensionNeeded(why)) => match extension(&field, opts, 2, &why)? {
                Some(big) => {
                    ext_rounds += 1;
                    if ext_rounds > 3 {
                        return Err(Error::Budget("too many base extensions on one chart".into()));
                    }
                    gens = embed_gens(&gens, &big)?;
                    div = embed_divisors(&div, &big)?;
                    field = big;
                    st.nodes[node].field = Some(FieldJson::of(&field));
                    continue 'chart;
                }
                None => unreachable!(),
            },
            Err(e) => return Err(e),
        };
        let mut budget = opts.budgets.max_prep;
        let prep = prepare_2d(&g1, r, &mut budget)?;
        steps.extend(prep.steps);
        let gens_p = prep.gens;
        for s in &steps {
            st.nodes[node].preps.push(coord_change_json(s, &VARS2));
        }
        st.nodes[node].generators = gens_p.iter().map(|g| poly_str(g, &VARS2)).collect();
        st.nodes[node].certificates.insert("r".into(), r.to_string());

        match prep.delta {
            None => {
                // the whole ideal sits in (yʳ): the r-fold curve splits off
                let quot = gens_p
                    .iter()
                    .map(|g| g.divide_by_mono(&[0, r]))
                    .collect::<Result<Vec<_>>>()?;
                let axis = v(&field, 1);
                div.push_minus(axis.clone(), r);
                let child = st.child(node, vec![], None, &field);
                let label = format!("({})^{}", poly_str(&axis, &VARS2), r);
                st.nodes[child].certificates.insert("divided-by".into(), label.clone());
                st.nodes[node].certificates.insert("curve-division".into(), label);
                st.nodes[node].status = "divided".into();
                st.queue.push_back(Item {
                    node: child,
                    gens: quot,
                    div,
                    field,
                    depth: depth + 1,
                    global,
                    chain: None,
                });
                return Ok(());
            }
            Some(d) => {
                // blow up the origin; survivors live on the x-chart line
                // {x₁ = 0} plus possibly the y-chart origin
                let x = v(&field, 0);
                let y = v(&field, 1);
                let imgs_x = vec![x.clone(), x.mul(&y)];
                let imgs_y = vec![x.mul(&y), y.clone()];
                let (gx, tx) = weak_transform(&gens_p, &imgs_x, 0)?;
                let (gy, ty) = weak_transform(&gens_p, &imgs_y, 1)?;
                if tx != r || ty != r {
                    return Err(Error::Internal(
                        "the weak transform divided by a power different from the order".into(),
                    ));
                }
                let wy = ideal_order(&gy)?;
                if wy >= r {
                    return Err(Error::Internal(
                        "an order-r point survived at the antipodal chart origin".into(),
                    ));
                }
                let surv = sing_on_coordinate_line(&gx, 2, 1)?;
                if surv.whole_line {
                    return Err(Error::Internal(
                        "the exceptional line is singular along itself after a prepared blow-up"
                            .into(),
                    ));
                }
                if let Some(lf) = &surv.leftover {
                    let deg = lf.deg().unwrap_or(2);
                    let why = "a singular point on the exceptional line is irrational";
                    match extension(&field, opts, deg, why)? {
                        Some(big) => {
                            ext_rounds += 1;
                            if ext_rounds > 3 {
                                return Err(Error::Budget(
                                    "too many base extensions on one chart".into(),
                                ));
                            }
                            gens = embed_gens(&gens, &big)?;
                            div = embed_divisors(&div, &big)?;
                            field = big;
                            st.nodes[node].field = Some(FieldJson::of(&field));
                            continue 'chart;
                        }
                        None => unreachable!(),
                    }
                }
                if !surv.complete {
                    return Err(Error::Uncertified(
                        "the survivor search on the exceptional line was incomplete".into(),
                    ));
                }

                st.nodes[node].certificates.insert("delta".into(), rat_str(&d));
                let path_idx = match extend_path {
                    Some(p) => {
                        st.paths[p].nodes.push(node);
                        st.paths[p].records.push(rat_str(&d));
                        p
                    }
                    None => {
                        st.paths.push(DescentPath {
                            kind: "twod-delta".into(),
                            nodes: vec![node],
                            records: vec![rat_str(&d)],
                        });
                        st.paths.len() - 1
                    }
                };

                let mut fibre = Vec::new();
                for c in &surv.roots {
                    // composite substitution: x ↦ x, y ↦ x(y + c)
                    let shift = y.add(&consts(&field, c));
                    let composite = vec![x.clone(), x.mul(&shift)];
                    let cc = CoordChange { images: vec![x.clone(), shift] };
                    let gch = cc.apply(&gx)?;
                    let ch_ord = ideal_order(&gch)?;
                    let preserved = ch_ord >= r;
                    let cdiv = transform_divisors(&div, &composite, 0, &field, preserved)?;
                    let child = st.child(
                        node,
                        composite.iter().map(|p| poly_str(p, &VARS2)).collect(),
                        Some(r),
                        &field,
                    );
                    let chain_next = if c.is_zero() && ch_ord == r {
                        Some(Chain { path: path_idx, r, delta: d.clone() })
                    } else {
                        None
                    };
                    fibre.push(c.to_string());
                    st.queue.push_back(Item {
                        node: child,
                        gens: gch,
                        div: cdiv,
                        field: field.clone(),
                        depth: depth + 1,
                        global: false,
                        chain: chain_next,
                    });
                }
                st.nodes[node]
                    .certificates
                    .insert("fibre-survivors".into(), format!("[{}]", fibre.join(", ")));
                if wy >= 2 {
                    let cdiv = transform_divisors(&div, &imgs_y, 1, &field, false)?;
                    let child = st.child(
                        node,
                        imgs_y.iter().map(|p| poly_str(p, &VARS2)).collect(),
                        Some(r),
                        &field,
                    );
                    st.queue.push_back(Item {
                        node: child,
                        gens: gy,
                        div: cdiv,
                        field: field.clone(),
                        depth: depth + 1,
                        global: false,
                        chain: None,
                    });
                } else {
                    st.nodes[node]
                        .certificates
                        .insert("witness-y-origin".into(), wy.to_string());
                }
                st.nodes[node].status = "blown-up".into();
                return Ok(());
            }
        }
    }
}

/// Extension policy: over Q stop honestly; over F_q extend when allowed.
/// Ok(Some(field)) means retry over the bigger field; every other outcome is
/// an error.
fn extension(field: &Field, opts: &ResolveOptions, deg: usize, why: &str) -> Result<Option<Field>> {
    match field {
        Field::Q => Err(Error::ExtensionNeeded(format!(
            "{why}; passing to a number field is not supported"
        ))),
        Field::Fq(fq) => {
            if !opts.allow_extension {
                return Err(Error::ExtensionNeeded(format!(
                    "{why}; rerun with extensions enabled"
                )));
            }
            let d = deg.max(2);
            Ok(Some(Field::Fq(fq.extend(d)?)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;
    use crate::polygon::rat;

    fn q2(src: &str) -> Poly {
        parse_poly(src, &VARS2, &Field::Q).unwrap()
    }

    fn fp2(src: &str, p: u64) -> Poly {
        let f = Field::Fq(crate::algebra::FqField::prime(p).unwrap());
        parse_poly(src, &VARS2, &f).unwrap()
    }

    fn success(trace: &Trace) -> bool {
        trace.outcome == Outcome::Success
    }

    #[test]
    fn good_params_shear_and_swap() {
        let (g, steps) = good_params_2d(&[q2("x^2")], 2).unwrap();
        assert_eq!(steps.len(), 1);
        assert!(!g[0].coeff(&[0, 2]).is_zero());
        // already good: no steps
        let (_, steps) = good_params_2d(&[q2("y^2 - x^3")], 2).unwrap();
        assert!(steps.is_empty());
    }

    #[test]
    fn good_params_small_field_needs_extension() {
        // xy(x + y) over F_2 vanishes at every rational direction
        let e = good_params_2d(&[fp2("x^2*y + x*y^2", 2)], 3).unwrap_err();
        assert!(matches!(e, Error::ExtensionNeeded(_)));
    }

    #[test]
    fn prepare_leaves_intrinsic_delta() {
        let mut budget = 8;
        let prep = prepare_2d(&[q2("y^3 - x^5")], 3, &mut budget).unwrap();
        assert!(prep.steps.is_empty());
        assert_eq!(prep.delta, Some(rat(5, 3)));
    }

    #[test]
    fn prepare_translates_solvable_front() {
        // (y − x²)² + x⁵: the front at δ = 2 is solvable with η = 1
        let mut budget = 8;
        let prep = prepare_2d(&[q2("y^2 - 2*x^2*y + x^4 + x^5")], 2, &mut budget).unwrap();
        assert_eq!(prep.steps.len(), 1);
        assert_eq!(prep.gens[0], q2("y^2 + x^5"));
        assert_eq!(prep.delta, Some(rat(5, 2)));
    }

    #[test]
    fn resolve_cusp_two_blowups() {
        let trace = resolve_2d(&[q2("y^3 - x^5")], &DivisorRecord::default(), &ResolveOptions::exact())
            .unwrap();
        assert!(success(&trace), "outcome: {:?}", trace.outcome);
        let blowups = trace.nodes.iter().filter(|n| n.status == "blown-up").count();
        assert_eq!(blowups, 2);
        // the r = 3 chain: a single path with δ = 5/3
        let p3: Vec<_> = trace.paths.iter().filter(|p| p.records[0] == "5/3").collect();
        assert_eq!(p3.len(), 1);
        assert_eq!(p3[0].nodes.len(), 1);
    }

    #[test]
    fn resolve_follows_delta_chain() {
        // y² − x⁷: δ = 7/2 → 5/2 → 3/2 → 1/2, three blow-ups on one chain
        let trace = resolve_2d(&[q2("y^2 - x^7")], &DivisorRecord::default(), &ResolveOptions::exact())
            .unwrap();
        assert!(success(&trace), "outcome: {:?}", trace.outcome);
        let path = trace.paths.iter().find(|p| p.kind == "twod-delta").unwrap();
        assert_eq!(path.records, vec!["7/2", "5/2", "3/2"]);
    }

    #[test]
    fn resolve_divides_multiple_curve() {
        // y²(1+x)² is singular along y = 0 and x = −1; both are divided out
        let trace = resolve_2d(
            &[q2("y^2 + 2*x*y^2 + x^2*y^2")],
            &DivisorRecord::default(),
            &ResolveOptions::exact(),
        )
        .unwrap();
        assert!(success(&trace), "outcome: {:?}", trace.outcome);
        assert!(trace.nodes.iter().any(|n| n.status == "divided"));
        assert!(trace.nodes.iter().any(|n| n.status == "recentered"));
    }

    #[test]
    fn resolve_off_origin_singularity() {
        // node at (0,0) and a second one at (1, 0)
        let trace = resolve_2d(
            &[q2("(y^2 - x^2*(x - 1)^2)")],
            &DivisorRecord::default(),
            &ResolveOptions::exact(),
        )
        .unwrap();
        assert!(success(&trace), "outcome: {:?}", trace.outcome);
        let recentered: Vec<_> = trace
            .nodes
            .iter()
            .filter(|n| n.certificates.contains_key("recenter"))
            .collect();
        assert_eq!(recentered.len(), 1);
    }

    #[test]
    fn resolve_fibre_survivor_off_origin() {
        // y² − x²(x+1)... char 2: survivors land away from the chart origin
        let trace = resolve_2d(
            &[fp2("y^2 + x^2*y + x^5", 3)],
            &DivisorRecord::default(),
            &ResolveOptions::exact(),
        )
        .unwrap();
        assert!(success(&trace), "outcome: {:?}", trace.outcome);
    }

    #[test]
    fn extension_policy_over_q_is_honest() {
        // y² + x²(x−c)² with irrational c: sing points at x² = 2
        let trace = resolve_2d(
            &[q2("y^2 + x^2*(x^2 - 2)^2")],
            &DivisorRecord::default(),
            &ResolveOptions::exact(),
        )
        .unwrap();
        assert!(matches!(trace.outcome, Outcome::ExtensionNeeded(_)), "{:?}", trace.outcome);
    }

    #[test]
    fn extension_resolves_over_f2() {
        // order-3 form xy(x+y) over F_2 needs F_4 for good parameters
        let mut opts = ResolveOptions::exact();
        opts.allow_extension = true;
        let trace = resolve_2d(
            &[fp2("x^2*y + x*y^2 + x^5 + y^5", 2)],
            &DivisorRecord::default(),
            &opts,
        )
        .unwrap();
        assert!(success(&trace), "outcome: {:?}", trace.outcome);
        assert!(trace.nodes.iter().any(|n| n.field.is_some()));
    }

    #[test]
    fn trace_round_trips() {
        let trace = resolve_2d(&[q2("y^3 - x^5")], &DivisorRecord::default(), &ResolveOptions::exact())
            .unwrap();
        let s = trace.to_json();
        let back = Trace::from_json(&s).unwrap();
        assert_eq!(back, trace);
    }
}
