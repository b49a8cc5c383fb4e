//! The solid machine: resolving an ideal in a three-variable chart over the
//! tree of point and curve blow-ups.
//!
//! Each chart owns its origin and, after a blow-up, the exceptional fibre —
//! partitioned as the full plane of the x-chart, the antipodal line of the
//! y-chart and the far origin of the z-chart (with the analogous split for
//! curve blow-ups). At an order-r origin the old exceptional components
//! through the point decide the machine: none → the directrix machine with
//! its τ-indexed descent (γ for τ = 2, the polygon triple Ω for τ = 1);
//! exactly one → the weighted coefficient machine on that component; two or
//! three → configuration blow-ups that shrink the count. Every descent law
//! the theory provides is asserted on the trace as the tree grows.

use std::collections::VecDeque;

use num::{One, Signed, ToPrimitive, Zero};

use crate::algebra::unipoly::{roots_in_field, UPoly};
use crate::algebra::{Field, K, Poly};
use crate::blowup::{
    check_center, curve_blowup, curve_images, point_blowup, point_images, sing_on_coordinate_line,
    transform_divisors, Center, DivisorRecord,
};
use crate::groebner;
use crate::polygon::{gamma_tau2, rat_str, rat_u, Invariants, Rat};
use crate::prepare::{tau2_solvable, very_well_prepare, Tau2Status, VwpCase};
use crate::resolver::preprocess::{
    c_move, surface_reduction, w_delta, z_coefficients, CMove, Reduction,
};
use crate::resolver::{
    embed_divisors, embed_gens, ideal_order, outcome_of_error, rebase_substitution, ResolveOptions,
};
use crate::singular::{good_parameters, nu_at_point, sing_ideal, CoordChange};
use crate::trace::{
    coord_change_json, divisors_json, poly_str, DescentPath, FieldJson, JobMeta, Outcome, Trace,
    TraceNode, TRACE_VERSION,
};
use crate::{Error, Result};

pub const VARS3: [&str; 3] = ["x", "y", "z"];

fn v(field: &Field, i: usize) -> Poly {
    Poly::var(field.clone(), 3, i)
}

fn consts(field: &Field, k: &K) -> Poly {
    Poly::constant(field.clone(), 3, k.clone())
}

fn identity3(field: &Field) -> Vec<Poly> {
    (0..3).map(|i| v(field, i)).collect()
}

fn swap3(field: &Field, i: usize, j: usize) -> CoordChange {
    let mut images = identity3(field);
    images.swap(i, j);
    CoordChange { images }
}

/// x ← x + t·y.
fn shear3(field: &Field, t: &K) -> CoordChange {
    let mut images = identity3(field);
    images[0] = images[0].add(&v(field, 1).scale(t));
    CoordChange { images }
}

/// y ← y + η·xⁿ.
fn front3(field: &Field, eta: &K, n: u32) -> CoordChange {
    let mut images = identity3(field);
    images[1] = images[1].add(&Poly::monomial(field.clone(), 3, &[n, 0, 0], eta.clone()));
    CoordChange { images }
}

fn as_int(r: &Rat) -> Option<u32> {
    if r.denom().is_one() && !r.numer().is_negative() {
        r.numer().to_u32()
    } else {
        None
    }
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
        if acc.as_ref().map(|g| g.deg() == Some(0)).unwrap_or(false) {
            break;
        }
    }
    Ok(acc)
}

/// Generators projected to the coordinate axis `keep` by elimination.
fn eliminate_keep(gens: &[Poly], keep: usize) -> Result<Vec<UPoly>> {
    let field = gens[0].field.clone();
    let work: Vec<Poly> = if keep == 2 {
        gens.to_vec()
    } else {
        swap3(&field, keep, 2).apply(gens)?
    };
    let eliminated = groebner::eliminate(&work, 2)?;
    eliminated.iter().map(|g| g.to_unipoly(2)).collect()
}

// ------------------------------------------------ fibre scans

/// Singular sites on the coordinate plane {x_plane = 0}: isolated points,
/// coordinate-parallel lines (pin variable and its value), and a defect when
/// irrational sites provably exist.
struct PlaneScan {
    points: Vec<[K; 3]>,
    lines: Vec<(usize, K)>,
    defect: Option<(usize, String)>,
    complete: bool,
}

fn coeff_slices(g: &Poly, free: usize, main: usize) -> Vec<UPoly> {
    let mut by_e: std::collections::BTreeMap<u32, Vec<(u32, K)>> = Default::default();
    for (m, c) in &g.terms {
        by_e.entry(m.get(free)).or_default().push((m.get(main), c.clone()));
    }
    let mut out = Vec::new();
    for (_, terms) in by_e {
        let deg = terms.iter().map(|(e, _)| *e).max().unwrap_or(0) as usize;
        let mut coeffs = vec![g.field.zero(); deg + 1];
        for (e, c) in terms {
            coeffs[e as usize] = coeffs[e as usize].add(&c);
        }
        out.push(UPoly::new(g.field.clone(), coeffs));
    }
    out
}

fn plane_scan(gens: &[Poly], plane: usize) -> Result<PlaneScan> {
    let field = gens[0].field.clone();
    let inplane: Vec<usize> = (0..3).filter(|&i| i != plane).collect();
    let sing = sing_ideal(gens, 2)?;
    let mut zero = identity3(&field);
    zero[plane] = Poly::zero(field.clone(), 3);
    let sliced: Vec<Poly> = sing
        .iter()
        .map(|g| g.substitute(&zero))
        .collect::<Result<Vec<_>>>()?;
    if sliced.iter().all(|g| g.is_known_zero()) {
        return Err(Error::Internal(
            "the exceptional plane is singular along its whole self".into(),
        ));
    }
    let mut defect: Option<(usize, String)> = None;
    let mut complete = true;
    let mut lines: Vec<(usize, K)> = Vec::new();

    // lines {x_pin = c} are cut out by the vanishing of every coefficient of
    // the free variable, an exact condition over the closure
    for (pos, &pin) in inplane.iter().enumerate() {
        let free = inplane[1 - pos];
        let mut slices = Vec::new();
        for g in &sliced {
            if g.is_known_zero() {
                continue;
            }
            slices.extend(coeff_slices(g, free, pin));
        }
        let Some(u) = gcd_all(&slices)? else { continue };
        if u.deg() == Some(0) {
            continue;
        }
        let (roots, cpl) = roots_in_field(&u)?;
        complete &= cpl;
        let mut rest = u.clone();
        for c in &roots {
            while rest.eval(c).is_zero() && rest.deg().unwrap_or(0) > 0 {
                rest = rest.deflate(c);
            }
            lines.push((pin, c.clone()));
        }
        if rest.deg().unwrap_or(0) > 0 && defect.is_none() {
            defect = Some((
                rest.deg().unwrap(),
                "a singular line on the exceptional plane is irrational".into(),
            ));
        }
    }

    // divide the found lines out of the sliced system so that the remaining
    // isolated points project finitely in at least one direction
    let mut work = sliced.clone();
    for (pin, c) in &lines {
        let mut fwd = identity3(&field);
        fwd[*pin] = fwd[*pin].add(&consts(&field, c));
        let mut back = identity3(&field);
        back[*pin] = back[*pin].add(&consts(&field, &c.neg()));
        let mut next = Vec::with_capacity(work.len());
        for g in &work {
            let shifted = g.substitute(&fwd)?;
            if shifted.is_known_zero() {
                continue;
            }
            let t = shifted.ord_along(&[*pin]).unwrap_or(0);
            let mut exps = [0u32; 3];
            exps[*pin] = t;
            next.push(shifted.divide_by_mono(&exps)?.substitute(&back)?);
        }
        work = next;
    }

    let mut points: Vec<[K; 3]> = Vec::new();
    if !work.is_empty() {
        let mut found_dir = false;
        for (pos, &main) in inplane.iter().enumerate() {
            let free = inplane[1 - pos];
            let uni = eliminate_keep(&work, main)?;
            let Some(u) = gcd_all(&uni)? else { continue };
            found_dir = true;
            if u.deg() == Some(0) {
                break;
            }
            let (roots, cpl) = roots_in_field(&u)?;
            complete &= cpl;
            let mut rest = u.clone();
            for c in &roots {
                while rest.eval(c).is_zero() && rest.deg().unwrap_or(0) > 0 {
                    rest = rest.deflate(c);
                }
            }
            if rest.deg().unwrap_or(0) > 0 && defect.is_none() {
                defect = Some((
                    rest.deg().unwrap(),
                    "a singular point on the exceptional plane is irrational".into(),
                ));
            }
            for c in roots {
                let mut at = identity3(&field);
                at[main] = consts(&field, &c);
                let restricted: Vec<UPoly> = work
                    .iter()
                    .map(|g| g.substitute(&at).and_then(|h| h.to_unipoly(free)))
                    .collect::<Result<_>>()?;
                let Some(u2) = gcd_all(&restricted)? else {
                    return Err(Error::Internal(
                        "a residual line escaped the line scan on the plane".into(),
                    ));
                };
                if u2.deg() == Some(0) {
                    continue;
                }
                let (r2, cpl2) = roots_in_field(&u2)?;
                complete &= cpl2;
                let mut rest2 = u2.clone();
                for d in &r2 {
                    while rest2.eval(d).is_zero() && rest2.deg().unwrap_or(0) > 0 {
                        rest2 = rest2.deflate(d);
                    }
                }
                if rest2.deg().unwrap_or(0) > 0 && defect.is_none() {
                    defect = Some((
                        rest2.deg().unwrap(),
                        "a singular point on the exceptional plane is irrational".into(),
                    ));
                }
                for d in r2 {
                    let mut pt = [field.zero(), field.zero(), field.zero()];
                    pt[main] = c.clone();
                    pt[free] = d;
                    points.push(pt);
                }
            }
            break;
        }
        if !found_dir && lines.is_empty() {
            return Err(Error::Unsupported(
                "the exceptional fibre contains a curve transverse to both coordinate directions"
                    .into(),
            ));
        }
    }

    points.retain(|p| !lines.iter().any(|(pin, c)| p[*pin] == *c));
    points.sort_by_key(|p| (p[0].to_string(), p[1].to_string(), p[2].to_string()));
    points.dedup();
    for p in &points {
        if !nu_at_point(gens, p)?.at_least(2) {
            return Err(Error::Internal(
                "vanishing of the derivative ideal did not certify the order".into(),
            ));
        }
    }
    Ok(PlaneScan { points, lines, defect, complete })
}

// ------------------------------------------------ global scan

/// Off-origin singular sites of a root-like chart: rational points and
/// coordinate-parallel lines, by elimination.
struct GlobalScan {
    points: Vec<[K; 3]>,
    /// (free direction, the other two coordinates pinned in index order)
    lines: Vec<(usize, [K; 2])>,
    defect: Option<(usize, String)>,
}

fn global_scan(gens: &[Poly]) -> Result<GlobalScan> {
    let field = gens[0].field.clone();
    let sing = sing_ideal(gens, 2)?;
    let dim = groebner::dimension(&sing)?;
    let mut out = GlobalScan { points: vec![], lines: vec![], defect: None };
    if dim < 0 {
        return Ok(out);
    }
    if dim >= 2 {
        return Err(Error::Unsupported(
            "a two-dimensional singular component survived surface reduction".into(),
        ));
    }
    if dim == 1 {
        // lines parallel to the x_free axis: the coefficients of x_free form
        // a system in the other two variables whose zeroes are the base points
        for free in 0..3 {
            let others: Vec<usize> = (0..3).filter(|&i| i != free).collect();
            let mut csys: Vec<Poly> = Vec::new();
            for g in &sing {
                let mut by_e: std::collections::BTreeMap<u32, Poly> = Default::default();
                for (m, c) in &g.terms {
                    let mut exps = [m.get(0), m.get(1), m.get(2)];
                    let e = exps[free];
                    exps[free] = 0;
                    let mono = Poly::monomial(field.clone(), 3, &exps, c.clone());
                    by_e
                        .entry(e)
                        .and_modify(|p| *p = p.add(&mono))
                        .or_insert(mono);
                }
                csys.extend(by_e.into_values());
            }
            // project the base system onto each of the two pinned axes
            let uni = eliminate_keep(&csys, others[0])?;
            let Some(u) = gcd_all(&uni)? else { continue };
            if u.deg() == Some(0) {
                continue;
            }
            let (roots, _) = roots_in_field(&u)?;
            let mut rest = u.clone();
            for a in &roots {
                while rest.eval(a).is_zero() && rest.deg().unwrap_or(0) > 0 {
                    rest = rest.deflate(a);
                }
                let mut at = identity3(&field);
                at[others[0]] = consts(&field, a);
                let restricted: Vec<UPoly> = csys
                    .iter()
                    .map(|g| g.substitute(&at).and_then(|h| h.to_unipoly(others[1])))
                    .collect::<Result<_>>()?;
                let Some(u2) = gcd_all(&restricted)? else { continue };
                let (r2, _) = roots_in_field(&u2)?;
                for b in r2 {
                    if a.is_zero() && b.is_zero() {
                        continue; // a coordinate axis is the origin machine's job
                    }
                    out.lines.push((free, [a.clone(), b]));
                }
            }
            if rest.deg().unwrap_or(0) > 0 && out.defect.is_none() {
                out.defect = Some((
                    rest.deg().unwrap(),
                    "a singular line has an irrational base point".into(),
                ));
            }
        }
    }
    // isolated points by a triangular cascade; directions whose projection is
    // dominant are skipped (their content lives in the detected lines)
    let mut any_dir = false;
    'dirs: for main in [2usize, 1, 0] {
        let uni = eliminate_keep(&sing, main)?;
        let Some(u) = gcd_all(&uni)? else { continue };
        any_dir = true;
        if u.deg() == Some(0) {
            break;
        }
        let (roots, complete) = roots_in_field(&u)?;
        if !complete && out.defect.is_none() {
            out.defect = Some((u.deg().unwrap_or(2), "irrational singular points".into()));
        }
        let mut rest = u.clone();
        for c in &roots {
            while rest.eval(c).is_zero() && rest.deg().unwrap_or(0) > 0 {
                rest = rest.deflate(c);
            }
        }
        if rest.deg().unwrap_or(0) > 0 && out.defect.is_none() {
            out.defect = Some((rest.deg().unwrap(), "irrational singular points".into()));
        }
        for c in roots {
            let mut at = identity3(&field);
            at[main] = consts(&field, &c);
            let sliced: Vec<Poly> = sing
                .iter()
                .map(|g| g.substitute(&at))
                .collect::<Result<_>>()?;
            if sliced.iter().all(|g| g.is_known_zero()) {
                continue; // a line through this slice; handled above
            }
            let others: Vec<usize> = (0..3).filter(|&i| i != main).collect();
            let uni2 = eliminate_keep(&sliced, others[0])?;
            let Some(u2) = gcd_all(&uni2)? else { continue };
            if u2.deg() == Some(0) {
                continue;
            }
            let (r2, c2) = roots_in_field(&u2)?;
            if !c2 && out.defect.is_none() {
                out.defect = Some((u2.deg().unwrap_or(2), "irrational singular points".into()));
            }
            for a in r2 {
                let mut at2 = at.clone();
                at2[others[0]] = consts(&field, &a);
                let restricted: Vec<UPoly> = sing
                    .iter()
                    .map(|g| g.substitute(&at2).and_then(|h| h.to_unipoly(others[1])))
                    .collect::<Result<_>>()?;
                let Some(u3) = gcd_all(&restricted)? else { continue };
                if u3.deg() == Some(0) {
                    continue;
                }
                let (r3, c3) = roots_in_field(&u3)?;
                if !c3 && out.defect.is_none() {
                    out.defect =
                        Some((u3.deg().unwrap_or(2), "irrational singular points".into()));
                }
                for b in r3 {
                    let mut pt = [field.zero(), field.zero(), field.zero()];
                    pt[main] = c.clone();
                    pt[others[0]] = a.clone();
                    pt[others[1]] = b;
                    out.points.push(pt);
                }
            }
        }
        break 'dirs;
    }
    if !any_dir && out.lines.is_empty() && dim >= 1 {
        return Err(Error::Unsupported(
            "the singular locus contains a curve that is not a coordinate-parallel line".into(),
        ));
    }
    out.points.retain(|p| {
        !p.iter().all(|k| k.is_zero())
            && !out.lines.iter().any(|(free, pins)| {
                let others: Vec<usize> = (0..3).filter(|&i| i != *free).collect();
                p[others[0]] == pins[0] && p[others[1]] == pins[1]
            })
    });
    out.points
        .sort_by_key(|p| (p[0].to_string(), p[1].to_string(), p[2].to_string()));
    out.points.dedup();
    for p in &out.points {
        if !nu_at_point(gens, p)?.at_least(2) {
            return Err(Error::Internal(
                "vanishing of the derivative ideal did not certify the order".into(),
            ));
        }
    }
    Ok(out)
}

// ------------------------------------------------ sites and policies

/// The per-edge descent law a chain child must verify on arrival.
#[derive(Clone, Debug)]
enum Law {
    /// τ = 2: the raw γ of the incoming generators is the parent's minus one.
    Gamma { gamma: Rat },
    /// Weighted machine: the raw weighted minimum drops by exactly one.
    Coeff { cdelta: Rat },
    /// τ = 1: Ω must lex-decrease, with the kind-specific exact sub-laws.
    Omega { kind: OmegaKind, omega: (Rat, Rat, Rat), eps_finite: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum OmegaKind {
    Tr1Zero,
    Tr1Eta,
    Tr2,
    Tr3,
    Tr4,
}

#[derive(Clone)]
enum Site {
    Forbidden(&'static str),
    Fresh,
    Chain(Law),
}

/// Fibre site classes of a point blow-up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PSite {
    XZero,
    XEta,
    XOff,
    XLineStrict,
    XLineYZero,
    XLineShift,
    YZero,
    YEta,
    YWhole,
    ZOrigin,
}

/// Fibre site classes of a curve blow-up; chart i carries the plane, chart j
/// the antipodal line, the base direction is k.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CSite {
    IZero,
    IAxis,
    IOff,
    ILineAxis,
    ILineSection,
    ILineFibre,
    JZero,
    JEta,
    JWhole,
}

#[derive(Clone)]
enum Machine {
    Tau3,
    Tau2 { gamma: Rat, path: usize },
    Tau1 { inv: Box<Invariants>, path: usize },
    Coeff { anchored: bool, cdelta: Rat, path: usize },
    EtaPattern,
    TrCurve { kind: OmegaKind, inv: Box<Invariants>, path: usize },
    CurveYZ,
    Tau2Curve,
    EtaDouble,
}

fn omega_triple(inv: &Invariants) -> (Rat, Rat, Rat) {
    (inv.omega.0.clone(), inv.omega.1.clone(), inv.omega.2.clone())
}

impl Machine {
    fn point_site(&self, s: PSite) -> Site {
        use PSite::*;
        match self {
            Machine::Tau3 => Site::Forbidden("the directrix bound admits no survivor for τ = 3"),
            Machine::Tau2 { gamma, .. } => match s {
                ZOrigin => Site::Chain(Law::Gamma { gamma: gamma.clone() }),
                _ => Site::Forbidden(
                    "the directrix bound confines τ = 2 survivors to the far origin",
                ),
            },
            Machine::Tau1 { inv, .. } => {
                let law = |kind| {
                    Site::Chain(Law::Omega {
                        kind,
                        omega: omega_triple(inv),
                        eps_finite: inv.eps.is_some(),
                    })
                };
                match s {
                    XZero | XLineStrict => law(OmegaKind::Tr1Zero),
                    XEta => law(OmegaKind::Tr1Eta),
                    YZero => law(OmegaKind::Tr2),
                    _ => Site::Forbidden(
                        "the directrix bound confines τ = 1 survivors to the strict line",
                    ),
                }
            }
            Machine::Coeff { anchored, cdelta, .. } => match s {
                XZero => Site::Chain(Law::Coeff { cdelta: cdelta.clone() }),
                YZero | XLineStrict if *anchored => Site::Forbidden(
                    "an anchored coefficient keeps the antipodal origin regular",
                ),
                _ => Site::Fresh,
            },
            Machine::EtaPattern => Site::Fresh,
            _ => Site::Forbidden("a curve policy consulted for a point blow-up"),
        }
    }

    fn curve_site(&self, s: CSite) -> Site {
        use CSite::*;
        match self {
            Machine::TrCurve { kind, inv, .. } => match s {
                IZero | ILineAxis => Site::Chain(Law::Omega {
                    kind: *kind,
                    omega: omega_triple(inv),
                    eps_finite: inv.eps.is_some(),
                }),
                IAxis => Site::Fresh,
                _ => Site::Forbidden(
                    "survivors of this curve blow-up stay on the strict surface",
                ),
            },
            Machine::CurveYZ => Site::Fresh,
            Machine::Tau2Curve => Site::Forbidden(
                "blowing up the directrix curve at τ = 2 leaves no survivors",
            ),
            Machine::EtaDouble => Site::Fresh,
            _ => Site::Forbidden("a point policy consulted for a curve blow-up"),
        }
    }
}

// ------------------------------------------------ the tree

struct St3 {
    nodes: Vec<TraceNode>,
    paths: Vec<DescentPath>,
    queue: VecDeque<Item3>,
}

impl St3 {
    /// Children record their creation-time field: the parent chart may
    /// extend its own base afterwards, and replay must not inherit that.
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
struct Chain3 {
    path: usize,
    r: u32,
    law: Law,
}

struct Item3 {
    node: usize,
    gens: Vec<Poly>,
    div: DivisorRecord,
    field: Field,
    depth: u32,
    global: bool,
    chain: Option<Chain3>,
}

/// Resolve a three-variable chart. The trace always comes back; failures are
/// folded into its outcome.
pub fn resolve_3d(gens: &[Poly], divisors: &DivisorRecord, opts: &ResolveOptions) -> Result<Trace> {
    if gens.is_empty() {
        return Err(Error::Parse("empty generator list".into()));
    }
    for g in gens {
        if g.nvars != 3 {
            return Err(Error::Parse("the solid machine expects three variables".into()));
        }
    }
    let field = gens[0].field.clone();
    let job = JobMeta {
        field: FieldJson::of(&field),
        vars: VARS3.iter().map(|s| s.to_string()).collect(),
        generators: gens.iter().map(|g| poly_str(g, &VARS3)).collect(),
        mode: "resolve-3d".into(),
        trunc: gens.iter().filter_map(|g| g.trunc).min(),
    };
    let mut st =
        St3 { nodes: vec![TraceNode::skeleton(0, None)], paths: vec![], queue: VecDeque::new() };
    st.queue.push_back(Item3 {
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
        if let Err(e) = step_3d(&mut st, item, opts) {
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
    n.tau = None;
}

/// Extension policy: over Q stop honestly; over F_q extend when allowed.
fn extension(field: &Field, opts: &ResolveOptions, deg: usize, why: &str) -> Result<Field> {
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
            Ok(Field::Fq(fq.extend(deg.max(2))?))
        }
    }
}

// ------------------------------------------------ blow-up drivers

enum Blown {
    Done,
    Extend { deg: usize, why: String },
}

struct Ctx<'a> {
    st: &'a mut St3,
    node: usize,
    div: &'a DivisorRecord,
    field: &'a Field,
    depth: u32,
}

impl Ctx<'_> {
    /// Queue one child chart reached by `composite` (upstairs variables in
    /// child variables), with the exceptional variable `exc`.
    fn push(
        &mut self,
        gens: Vec<Poly>,
        composite: &[Poly],
        exc: usize,
        ord: u32,
        r: u32,
        chain: Option<Chain3>,
    ) -> Result<usize> {
        let preserved = ord >= r;
        let cdiv = transform_divisors(self.div, composite, exc, self.field, preserved)?;
        let child = self.st.child(
            self.node,
            composite.iter().map(|p| poly_str(p, &VARS3)).collect(),
            Some(r),
            self.field,
        );
        self.st.queue.push_back(Item3 {
            node: child,
            gens,
            div: cdiv,
            field: self.field.clone(),
            depth: self.depth + 1,
            global: false,
            chain,
        });
        Ok(child)
    }
}

/// Hand out descent-path indices to chain children: the first continues the
/// blowing node's path, every further survivor forks its own copy so that
/// each path stays one line of infinitely near points.
struct PathSpring {
    primary: Option<usize>,
    used: bool,
}

impl PathSpring {
    fn new(primary: Option<usize>) -> Self {
        PathSpring { primary, used: false }
    }

    fn next(&mut self, st: &mut St3) -> Result<usize> {
        let primary = self.primary.ok_or_else(|| {
            Error::Internal("a chain site fired without a descent path".into())
        })?;
        if !self.used {
            self.used = true;
            return Ok(primary);
        }
        let kind = st.paths[primary].kind.clone();
        let node = *st.paths[primary].nodes.last().unwrap();
        let rec = st.paths[primary].records.last().unwrap().clone();
        st.paths.push(DescentPath { kind, nodes: vec![node], records: vec![rec] });
        Ok(st.paths.len() - 1)
    }
}

/// Decide the child for one surviving site: apply the policy at order ≥ r,
/// pass plainly below it.
fn site_child(
    site: Site,
    ord: u32,
    r: u32,
    spring: &mut PathSpring,
    st: &mut St3,
) -> Result<Option<Chain3>> {
    if ord < r {
        return Ok(None);
    }
    match site {
        Site::Forbidden(why) => Err(Error::Internal(why.into())),
        Site::Fresh => Ok(None),
        Site::Chain(law) => {
            let path = spring.next(st)?;
            Ok(Some(Chain3 { path, r, law }))
        }
    }
}

fn machine_path(machine: &Machine) -> Option<usize> {
    match machine {
        Machine::Tau2 { path, .. }
        | Machine::Tau1 { path, .. }
        | Machine::Coeff { path, .. }
        | Machine::TrCurve { path, .. } => Some(*path),
        _ => None,
    }
}

/// Blow up the origin and queue every responsible fibre site plus the
/// strictly interior singular remainder of the three charts.
fn blow_point(cx: &mut Ctx, gens: &[Poly], r: u32, machine: &Machine) -> Result<Blown> {
    let field = cx.field.clone();
    let charts = point_blowup(gens)?;
    for (_, t) in &charts {
        if *t != r {
            return Err(Error::Internal(
                "the weak transform divided by a power different from the order".into(),
            ));
        }
    }
    let (gx, gy, gz) = (&charts[0].0, &charts[1].0, &charts[2].0);
    let pscan = plane_scan(gx, 0)?;
    if let Some((deg, why)) = pscan.defect {
        return Ok(Blown::Extend { deg, why });
    }
    if !pscan.complete {
        return Err(Error::Uncertified(
            "the survivor search on the exceptional plane was incomplete".into(),
        ));
    }
    let yline = sing_on_coordinate_line(gy, 2, 2)?;
    if let Some(lf) = &yline.leftover {
        return Ok(Blown::Extend {
            deg: lf.deg().unwrap_or(2),
            why: "a singular point on the antipodal line is irrational".into(),
        });
    }
    if !yline.complete {
        return Err(Error::Uncertified(
            "the survivor search on the antipodal line was incomplete".into(),
        ));
    }

    let path_hint = machine_path(machine);
    let imgs_x = point_images(&field, 0);
    let imgs_y = point_images(&field, 1);
    let imgs_z = point_images(&field, 2);

    // classify every site with its recentered order before queuing; the
    // theory constrains positions (the policy), not the survivor count
    let mut fibre_pts = Vec::new();
    let mut fibre_lines = Vec::new();

    struct PendingPt {
        gens: Vec<Poly>,
        composite: Vec<Poly>,
        exc: usize,
        ord: u32,
        site: Site,
        label: String,
    }
    let mut pending: Vec<PendingPt> = Vec::new();
    // classes of through-origin sites of the x-chart, merged into one child
    let mut origin_classes: Vec<(PSite, bool)> = Vec::new();

    for p in &pscan.points {
        if p[1].is_zero() && p[2].is_zero() {
            let ord = ideal_order(gx)?;
            origin_classes.push((PSite::XZero, ord >= r));
            if ord >= r {
                fibre_pts.push("(0, 0)".into());
            }
            continue;
        }
        let shift = vec![
            v(&field, 0),
            v(&field, 1).add(&consts(&field, &p[1])),
            v(&field, 2).add(&consts(&field, &p[2])),
        ];
        let moved = CoordChange { images: shift.clone() }.apply(gx)?;
        let ord = ideal_order(&moved)?;
        if ord < 2 {
            return Err(Error::Internal("a scanned fibre point is regular".into()));
        }
        let class = if p[2].is_zero() { PSite::XEta } else { PSite::XOff };
        let composite: Vec<Poly> =
            imgs_x.iter().map(|q| q.substitute(&shift)).collect::<Result<_>>()?;
        if ord >= r {
            fibre_pts.push(format!("({}, {})", p[1], p[2]));
        }
        pending.push(PendingPt {
            gens: moved,
            composite,
            exc: 0,
            ord,
            site: machine.point_site(class),
            label: format!("x:({}, {})", p[1], p[2]),
        });
    }
    for (pin, c) in &pscan.lines {
        let class = match (pin, c.is_zero()) {
            (2, true) => PSite::XLineStrict,
            (1, true) => PSite::XLineYZero,
            _ => PSite::XLineShift,
        };
        let mut shift = identity3(&field);
        shift[*pin] = shift[*pin].add(&consts(&field, c));
        let moved = CoordChange { images: shift.clone() }.apply(gx)?;
        let l_ord = moved
            .iter()
            .filter_map(|g| g.ord_along(&[0, *pin]))
            .min()
            .unwrap_or(0);
        if l_ord >= r {
            fibre_lines.push(format!("x{} = {}", pin, c));
        }
        if c.is_zero() {
            origin_classes.push((class, l_ord >= r));
            continue;
        }
        let ord = ideal_order(&moved)?;
        let composite: Vec<Poly> =
            imgs_x.iter().map(|q| q.substitute(&shift)).collect::<Result<_>>()?;
        let site = if l_ord >= r { machine.point_site(class) } else { Site::Fresh };
        pending.push(PendingPt {
            gens: moved,
            composite,
            exc: 0,
            ord: if l_ord >= r { r } else { ord },
            site,
            label: format!("x-line {} = {}", pin, c),
        });
    }
    if !origin_classes.is_empty() {
        let at_r: Vec<&PSite> =
            origin_classes.iter().filter(|(_, a)| *a).map(|(c, _)| c).collect();
        let ord = if at_r.is_empty() { ideal_order(gx)? } else { r };
        let mut site = Site::Fresh;
        for c in &at_r {
            match machine.point_site(**c) {
                Site::Forbidden(why) => {
                    return Err(annotate(Error::Internal(why.into()), "x-origin"))
                }
                Site::Chain(law) => site = Site::Chain(law),
                Site::Fresh => {}
            }
        }
        pending.push(PendingPt {
            gens: gx.clone(),
            composite: imgs_x.clone(),
            exc: 0,
            ord,
            site,
            label: "x-origin".into(),
        });
    }
    if yline.whole_line {
        let ord = ideal_order(gy)?;
        let l_ord = gy.iter().filter_map(|g| g.ord_along(&[0, 1])).min().unwrap_or(0);
        if l_ord >= r {
            fibre_lines.push("y-antipodal".into());
        }
        let site = if l_ord >= r { machine.point_site(PSite::YWhole) } else { Site::Fresh };
        pending.push(PendingPt {
            gens: gy.clone(),
            composite: imgs_y.clone(),
            exc: 1,
            ord: if l_ord >= r { r } else { ord },
            site,
            label: "y-line whole".into(),
        });
    } else {
        for d in &yline.roots {
            let shift = vec![
                v(&field, 0),
                v(&field, 1),
                v(&field, 2).add(&consts(&field, d)),
            ];
            let moved = CoordChange { images: shift.clone() }.apply(gy)?;
            let ord = ideal_order(&moved)?;
            if ord < 2 {
                continue;
            }
            let class = if d.is_zero() { PSite::YZero } else { PSite::YEta };
            let composite: Vec<Poly> =
                imgs_y.iter().map(|q| q.substitute(&shift)).collect::<Result<_>>()?;
            if ord >= r {
                fibre_pts.push(format!("y:({})", d));
            }
            pending.push(PendingPt {
                gens: moved,
                composite,
                exc: 1,
                ord,
                site: machine.point_site(class),
                label: format!("y:({})", d),
            });
        }
    }
    let z_ord = ideal_order(gz)?;
    if z_ord >= 2 {
        if z_ord >= r {
            fibre_pts.push("z-origin".into());
        }
        pending.push(PendingPt {
            gens: gz.clone(),
            composite: imgs_z.clone(),
            exc: 2,
            ord: z_ord,
            site: machine.point_site(PSite::ZOrigin),
            label: "z-origin".into(),
        });
    }

    let mut spring = PathSpring::new(path_hint);
    for p in pending {
        let chain = site_child(p.site, p.ord, r, &mut spring, cx.st)
            .map_err(|e| annotate(e, &p.label))?;
        cx.push(p.gens, &p.composite, p.exc, p.ord, r, chain)?;
    }
    let certs = &mut cx.st.nodes[cx.node].certificates;
    certs.insert("fibre-survivors".into(), format!("[{}]", fibre_pts.join(", ")));
    if !fibre_lines.is_empty() {
        certs.insert("fibre-lines".into(), format!("[{}]", fibre_lines.join(", ")));
    }
    Ok(Blown::Done)
}

fn annotate(e: Error, label: &str) -> Error {
    match e {
        Error::Internal(m) => Error::Internal(format!("{m} (at {label})")),
        other => other,
    }
}

/// Blow up the coordinate curve V(x_i, x_j) and queue the fibre sites.
fn blow_curve(
    cx: &mut Ctx,
    gens: &[Poly],
    r: u32,
    i: usize,
    j: usize,
    machine: &Machine,
) -> Result<Blown> {
    let field = cx.field.clone();
    let k = 3 - i - j;
    let charts = curve_blowup(gens, i, j)?;
    for (_, _, t) in &charts {
        if *t != r {
            return Err(Error::Internal(
                "the weak transform divided by a power different from the order".into(),
            ));
        }
    }
    let gi = &charts[0].1;
    let gj = &charts[1].1;
    let pscan = plane_scan(gi, i)?;
    if let Some((deg, why)) = pscan.defect {
        return Ok(Blown::Extend { deg, why });
    }
    if !pscan.complete {
        return Err(Error::Uncertified(
            "the survivor search on the exceptional surface was incomplete".into(),
        ));
    }
    let jline = sing_on_coordinate_line(gj, 2, k)?;
    if let Some(lf) = &jline.leftover {
        return Ok(Blown::Extend {
            deg: lf.deg().unwrap_or(2),
            why: "a surviving fibre point of the curve blow-up is irrational".into(),
        });
    }
    if !jline.complete {
        return Err(Error::Uncertified(
            "the survivor search on the curve blow-up was incomplete".into(),
        ));
    }

    let path_hint = machine_path(machine);
    let imgs_i = curve_images(&field, i, j, i);
    let imgs_j = curve_images(&field, i, j, j);

    struct PendingPt {
        gens: Vec<Poly>,
        composite: Vec<Poly>,
        exc: usize,
        ord: u32,
        site: Site,
        label: String,
    }
    let mut pending: Vec<PendingPt> = Vec::new();
    let mut sections = 0usize;
    let mut fibre_pts = Vec::new();
    let mut origin_classes: Vec<(CSite, bool)> = Vec::new();

    for p in &pscan.points {
        if p[j].is_zero() && p[k].is_zero() {
            let ord = ideal_order(gi)?;
            origin_classes.push((CSite::IZero, ord >= r));
            if ord >= r {
                fibre_pts.push("i:(0, 0)".into());
            }
            continue;
        }
        let mut shift = identity3(&field);
        shift[j] = shift[j].add(&consts(&field, &p[j]));
        shift[k] = shift[k].add(&consts(&field, &p[k]));
        let moved = CoordChange { images: shift.clone() }.apply(gi)?;
        let ord = ideal_order(&moved)?;
        if ord < 2 {
            return Err(Error::Internal("a scanned fibre point is regular".into()));
        }
        let class = if p[j].is_zero() { CSite::IAxis } else { CSite::IOff };
        let composite: Vec<Poly> =
            imgs_i.iter().map(|q| q.substitute(&shift)).collect::<Result<_>>()?;
        if ord >= r {
            fibre_pts.push(format!("i:({}, {})", p[j], p[k]));
        }
        pending.push(PendingPt {
            gens: moved,
            composite,
            exc: i,
            ord,
            site: machine.curve_site(class),
            label: format!("chart-{i} point"),
        });
    }
    for (pin, c) in &pscan.lines {
        let mut shift = identity3(&field);
        shift[*pin] = shift[*pin].add(&consts(&field, c));
        let moved = CoordChange { images: shift.clone() }.apply(gi)?;
        let l_ord = moved
            .iter()
            .filter_map(|g| g.ord_along(&[i, *pin]))
            .min()
            .unwrap_or(0);
        let class = if *pin == j {
            if c.is_zero() {
                CSite::ILineAxis
            } else {
                CSite::ILineSection
            }
        } else {
            CSite::ILineFibre
        };
        if l_ord >= r && class != CSite::ILineFibre {
            sections += 1;
        }
        if c.is_zero() {
            origin_classes.push((class, l_ord >= r));
            continue;
        }
        let ord = ideal_order(&moved)?;
        let composite: Vec<Poly> =
            imgs_i.iter().map(|q| q.substitute(&shift)).collect::<Result<_>>()?;
        let site = if l_ord >= r { machine.curve_site(class) } else { Site::Fresh };
        pending.push(PendingPt {
            gens: moved,
            composite,
            exc: i,
            ord: if l_ord >= r { r } else { ord },
            site,
            label: format!("chart-{i} line"),
        });
    }
    if !origin_classes.is_empty() {
        let at_r: Vec<&CSite> =
            origin_classes.iter().filter(|(_, a)| *a).map(|(c, _)| c).collect();
        let ord = if at_r.is_empty() { ideal_order(gi)? } else { r };
        let mut site = Site::Fresh;
        for c in &at_r {
            match machine.curve_site(**c) {
                Site::Forbidden(why) => {
                    return Err(annotate(Error::Internal(why.into()), "chart-i origin"))
                }
                Site::Chain(law) => site = Site::Chain(law),
                Site::Fresh => {}
            }
        }
        pending.push(PendingPt {
            gens: gi.clone(),
            composite: imgs_i.clone(),
            exc: i,
            ord,
            site,
            label: format!("chart-{i} origin"),
        });
    }
    if jline.whole_line {
        let ord = ideal_order(gj)?;
        let l_ord = gj.iter().filter_map(|g| g.ord_along(&[i, j])).min().unwrap_or(0);
        if l_ord >= r {
            sections += 1;
        }
        let site = if l_ord >= r { machine.curve_site(CSite::JWhole) } else { Site::Fresh };
        pending.push(PendingPt {
            gens: gj.clone(),
            composite: imgs_j.clone(),
            exc: j,
            ord: if l_ord >= r { r } else { ord },
            site,
            label: format!("chart-{j} line whole"),
        });
    } else {
        for d in &jline.roots {
            let mut shift = identity3(&field);
            shift[k] = shift[k].add(&consts(&field, d));
            let moved = CoordChange { images: shift.clone() }.apply(gj)?;
            let ord = ideal_order(&moved)?;
            if ord < 2 {
                continue;
            }
            let class = if d.is_zero() { CSite::JZero } else { CSite::JEta };
            let composite: Vec<Poly> =
                imgs_j.iter().map(|q| q.substitute(&shift)).collect::<Result<_>>()?;
            if ord >= r {
                fibre_pts.push(format!("j:({})", d));
            }
            pending.push(PendingPt {
                gens: moved,
                composite,
                exc: j,
                ord,
                site: machine.curve_site(class),
                label: format!("chart-{j} point"),
            });
        }
    }

    let mut spring = PathSpring::new(path_hint);
    for p in pending {
        let chain = site_child(p.site, p.ord, r, &mut spring, cx.st)
            .map_err(|e| annotate(e, &p.label))?;
        cx.push(p.gens, &p.composite, p.exc, p.ord, r, chain)?;
    }
    let certs = &mut cx.st.nodes[cx.node].certificates;
    certs.insert("fibre-survivors".into(), format!("[{}]", fibre_pts.join(", ")));
    if sections > 0 {
        certs.insert("fibre-section".into(), "1".into());
    }
    Ok(Blown::Done)
}

// ------------------------------------------------ the step

fn omega_str(inv: &Invariants) -> String {
    format!(
        "({}, {}, {})",
        rat_str(&inv.omega.0),
        rat_str(&inv.omega.1),
        rat_str(&inv.omega.2)
    )
}

fn vwp_case_str(case: &VwpCase) -> String {
    match case {
        VwpCase::Case1 => "1".into(),
        VwpCase::Case2a => "2a".into(),
        VwpCase::Case2b => "2b".into(),
        VwpCase::Case2c { n } => format!("2c(n={n})"),
        VwpCase::SurfaceCase => "surface".into(),
    }
}

/// γ from the visible terms, checked against the truncation bound.
fn certified_gamma(gens: &[Poly], r: u32) -> Result<Option<Rat>> {
    let g = gamma_tau2(gens, r);
    let tr = gens.iter().filter_map(|p| p.trunc).min();
    if let (Some(g), Some(t)) = (&g, tr) {
        if t + 1 < r || *g > rat_u(t + 1, r) {
            return Err(Error::Truncation(
                "γ is not certified at this truncation bound".into(),
            ));
        }
    }
    Ok(g)
}

/// Whether V(x_i, x_j) lies inside the order-r locus, testable termwise.
fn curve_in_sing(gens: &[Poly], r: u32, i: usize, j: usize) -> Result<bool> {
    let sg = sing_ideal(gens, r)?;
    for g in &sg {
        for m in g.terms.keys() {
            if m.get(i) + m.get(j) == 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A chart re-entered after a base extension reaches this again for the same
/// node; the node must not appear on its path twice, so a repeat visit
/// overwrites the record instead.
fn extend_or_new(st: &mut St3, node: usize, hint: Option<usize>, kind: &str, record: String) -> usize {
    let replace = |path: &mut DescentPath, record: String| {
        *path.records.last_mut().expect("a path holds one record per node") = record;
    };
    if let Some(p) = hint {
        if st.paths[p].nodes.last() == Some(&node) {
            replace(&mut st.paths[p], record);
        } else {
            st.paths[p].nodes.push(node);
            st.paths[p].records.push(record);
        }
        return p;
    }
    for p in 0..st.paths.len() {
        if st.paths[p].kind == kind && st.paths[p].nodes.last() == Some(&node) {
            replace(&mut st.paths[p], record);
            return p;
        }
    }
    st.paths.push(DescentPath { kind: kind.into(), nodes: vec![node], records: vec![record] });
    st.paths.len() - 1
}

/// Close the node as "divided" and queue the reduced surface, with the
/// divisor record updated by the ν-rule.
#[allow(clippy::too_many_arguments)]
fn surface_divide(
    st: &mut St3,
    node: usize,
    gens: &[Poly],
    div: &DivisorRecord,
    field: Field,
    depth: u32,
    global: bool,
    red: Reduction,
    r: u32,
) -> Result<()> {
    let child_ord = ideal_order(&red.gens)?;
    let label = format!("({})^{}", poly_str(&red.f, &VARS3), red.t);
    let recorded = div.plus.iter().chain(div.minus.iter()).any(|c| c.poly == red.f);
    let mut ndiv = div.clone();
    if child_ord >= r {
        if !recorded {
            ndiv.push_plus(red.f.clone(), red.t);
        }
    } else {
        let mut reset = DivisorRecord::empty();
        for c in ndiv.plus.iter().chain(ndiv.minus.iter()) {
            reset.push_minus(c.poly.clone(), c.mult);
        }
        if !recorded {
            reset.push_minus(red.f.clone(), red.t);
        }
        ndiv = reset;
    }
    let child = st.child(node, vec![], None, &field);
    st.nodes[child].certificates.insert("divided-by".into(), label.clone());
    st.nodes[node].generators = gens.iter().map(|g| poly_str(g, &VARS3)).collect();
    st.nodes[node].certificates.insert("surface-division".into(), label);
    st.nodes[node].certificates.insert("division-kind".into(), red.kind.into());
    st.nodes[node].status = "divided".into();
    st.queue.push_back(Item3 {
        node: child,
        gens: red.gens,
        div: ndiv,
        field,
        depth: depth + 1,
        global,
        chain: None,
    });
    Ok(())
}

fn step_3d(st: &mut St3, item: Item3, opts: &ResolveOptions) -> Result<()> {
    let Item3 { node, gens: gens0, div: div0, field: field0, depth, global, chain } = item;
    if depth > opts.budgets.max_depth {
        return Err(Error::Budget("the blow-up depth budget is exhausted".into()));
    }
    let mut gens = gens0;
    let mut div = div0;
    let mut field = field0;
    let mut ext_rounds = 0u32;
    let birth_certs = st.nodes[node].certificates.clone();

    let bump = |field: &mut Field,
                    gens: &mut Vec<Poly>,
                    div: &mut DivisorRecord,
                    ext_rounds: &mut u32,
                    st: &mut St3,
                    deg: usize,
                    why: &str|
     -> Result<()> {
        let big = extension(field, opts, deg, why)?;
        *ext_rounds += 1;
        if *ext_rounds > 3 {
            return Err(Error::Budget("too many base extensions on one chart".into()));
        }
        *gens = embed_gens(gens, &big)?;
        *div = embed_divisors(div, &big)?;
        rebase_substitution(&mut st.nodes[node], field, &big, &VARS3)?;
        *field = big;
        st.nodes[node].field = Some(FieldJson::of(field));
        Ok(())
    };

    // a defect-free scan is complete over the closure, so never rerun it
    // after a later extension: the children are already queued
    let mut scanned = false;

    'chart: loop {
        reset_node(&mut st.nodes[node], &birth_certs);
        st.nodes[node].divisors = divisors_json(&div, &VARS3);
        st.nodes[node].trunc = gens.iter().filter_map(|g| g.trunc).min();
        let ord = ideal_order(&gens)?;
        st.nodes[node].nu = ord.to_string();

        // a perfect-power or recorded component masks the positional scan;
        // divide it out before looking for off-origin sites
        if global && ord >= 2 {
            if let Some(red) = surface_reduction(&gens, &div, ord)? {
                return surface_divide(st, node, &gens, &div, field, depth, global, red, ord);
            }
        }

        // root-like charts position every off-origin singular site
        if global && !scanned {
            let scan = match global_scan(&gens) {
                Ok(s) => s,
                Err(e) => return Err(e),
            };
            if let Some((deg, why)) = scan.defect {
                bump(&mut field, &mut gens, &mut div, &mut ext_rounds, st, deg, &why)?;
                continue 'chart;
            }
            scanned = true;
            for p in &scan.points {
                let images: Vec<Poly> = (0..3)
                    .map(|ix| v(&field, ix).add(&consts(&field, &p[ix])))
                    .collect();
                let cc = CoordChange { images };
                let moved = cc.apply(&gens)?;
                let mdiv = div.map(&cc.images)?;
                let child = st.child(node, coord_change_json(&cc, &VARS3), None, &field);
                st.nodes[child]
                    .certificates
                    .insert("recenter".into(), format!("({}, {}, {})", p[0], p[1], p[2]));
                st.queue.push_back(Item3 {
                    node: child,
                    gens: moved,
                    div: mdiv,
                    field: field.clone(),
                    depth: depth + 1,
                    global: false,
                    chain: None,
                });
            }
            for (free, pins) in &scan.lines {
                let others: Vec<usize> = (0..3).filter(|&i| i != *free).collect();
                let mut images = identity3(&field);
                images[others[0]] = images[others[0]].add(&consts(&field, &pins[0]));
                images[others[1]] = images[others[1]].add(&consts(&field, &pins[1]));
                let cc = CoordChange { images };
                let moved = cc.apply(&gens)?;
                let mdiv = div.map(&cc.images)?;
                let child = st.child(node, coord_change_json(&cc, &VARS3), None, &field);
                st.nodes[child].certificates.insert(
                    "recenter-line".into(),
                    format!("x{} free at ({}, {})", free, pins[0], pins[1]),
                );
                st.queue.push_back(Item3 {
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

        if ord <= 1 {
            st.nodes[node].generators = gens.iter().map(|g| poly_str(g, &VARS3)).collect();
            st.nodes[node].certificates.insert("origin-order".into(), ord.to_string());
            if st.nodes[node].status == "open" {
                st.nodes[node].status = "resolved".into();
            }
            return Ok(());
        }
        let r = ord;
        if let Some(ch) = &chain {
            if ch.r != r {
                return Err(Error::Internal(
                    "a chain child arrived with a different order".into(),
                ));
            }
        }

        // raw descent laws are read off the incoming generators
        let mut omega_chain: Option<(usize, OmegaKind, (Rat, Rat, Rat), bool)> = None;
        let mut gamma_chain_path: Option<usize> = None;
        let mut coeff_chain_path: Option<usize> = None;
        match &chain {
            Some(Chain3 { law: Law::Gamma { gamma }, path, .. }) => {
                let raw = certified_gamma(&gens, r)?;
                let expected = gamma.clone() - Rat::one();
                if raw.as_ref() != Some(&expected) {
                    return Err(Error::Internal(
                        "γ failed to drop by one along the chain".into(),
                    ));
                }
                st.nodes[node].certificates.insert("gamma-raw".into(), rat_str(&expected));
                gamma_chain_path = Some(*path);
            }
            Some(Chain3 { law: Law::Coeff { cdelta }, path, .. }) => {
                let raw = w_delta(&z_coefficients(&gens, r)?)?;
                let expected = cdelta.clone() - Rat::one();
                if raw.as_ref() != Some(&expected) {
                    return Err(Error::Internal(
                        "the weighted minimum failed to drop by one along the chain".into(),
                    ));
                }
                st.nodes[node].certificates.insert("cdelta-raw".into(), rat_str(&expected));
                coeff_chain_path = Some(*path);
            }
            Some(Chain3 { law: Law::Omega { kind, omega, eps_finite }, path, .. }) => {
                omega_chain = Some((*path, *kind, omega.clone(), *eps_finite));
            }
            None => {}
        }

        // divisorial reductions: extract 2-dimensional centres
        if let Some(red) = surface_reduction(&gens, &div, r)? {
            return surface_divide(st, node, &gens, &div, field, depth, global, red, r);
        }

        let eta = div.eta_at_origin();
        let machine_res: Result<()> = 'machine: {
            if eta == 1 {
                // ---- the weighted coefficient machine on the old component
                let comp = div
                    .minus
                    .iter()
                    .find(|c| c.poly.coeff(&[0, 0, 0]).is_zero())
                    .cloned()
                    .ok_or_else(|| Error::Internal("η = 1 without a component".into()))?;
                let caxis = {
                    let mut found = None;
                    for kv in 0..3 {
                        let pure = comp.poly.terms.keys().all(|m| {
                            m.get(kv) == 1 && (0..3).all(|i| i == kv || m.get(i) == 0)
                        });
                        if pure && !comp.poly.terms.is_empty() {
                            found = Some(kv);
                            break;
                        }
                    }
                    found
                };
                let Some(caxis) = caxis else {
                    break 'machine Err(Error::Unsupported(
                        "the old exceptional component through the origin is not a coordinate plane"
                            .into(),
                    ));
                };
                let mut gens_c = gens.clone();
                let mut div_c = div.clone();
                let mut preps: Vec<CoordChange> = Vec::new();
                if caxis != 2 {
                    let cc = swap3(&field, caxis, 2);
                    gens_c = cc.apply(&gens_c)?;
                    div_c = div_c.map(&cc.images)?;
                    preps.push(cc);
                }
                if let Some(path) = coeff_chain_path {
                    let _ = path; // raw law already checked on arrival
                }
                let mut budget = opts.budgets.max_prep;
                let mut prev_delta: Option<Rat> = None;
                loop {
                    let mv = match c_move(&gens_c, r) {
                        Ok(m) => m,
                        Err(e) => break 'machine Err(e),
                    };
                    match mv {
                        CMove::Swap => {
                            let cc = swap3(&field, 0, 1);
                            gens_c = cc.apply(&gens_c)?;
                            div_c = div_c.map(&cc.images)?;
                            preps.push(cc);
                        }
                        CMove::Shear(t) => {
                            let cc = shear3(&field, &t);
                            gens_c = cc.apply(&gens_c)?;
                            div_c = div_c.map(&cc.images)?;
                            preps.push(cc);
                        }
                        CMove::Translate { eta: e, n } => {
                            let before = w_delta(&z_coefficients(&gens_c, r)?)?;
                            let cc = front3(&field, &e, n);
                            gens_c = cc.apply(&gens_c)?;
                            div_c = div_c.map(&cc.images)?;
                            preps.push(cc);
                            let after = w_delta(&z_coefficients(&gens_c, r)?)?;
                            if let (Some(b), Some(a)) = (&before, &after) {
                                if a <= b {
                                    break 'machine Err(Error::Internal(
                                        "the weighted front survived its own translation".into(),
                                    ));
                                }
                            }
                            prev_delta = None;
                        }
                        CMove::CurveYZ => {
                            for s in &preps {
                                st.nodes[node].preps.push(coord_change_json(s, &VARS3));
                            }
                            st.nodes[node].generators =
                                gens_c.iter().map(|g| poly_str(g, &VARS3)).collect();
                            st.nodes[node].certificates.insert("r".into(), r.to_string());
                            st.nodes[node]
                                .certificates
                                .insert("eta-curve".into(), "(y, z)".into());
                            check_center(&gens_c, r, Center::Curve(1, 2), &div_c)?;
                            let mut cx = Ctx { st, node, div: &div_c, field: &field, depth };
                            match blow_curve(&mut cx, &gens_c, r, 1, 2, &Machine::CurveYZ)? {
                                Blown::Done => {}
                                Blown::Extend { deg, why } => {
                                    bump(
                                        &mut field,
                                        &mut gens,
                                        &mut div,
                                        &mut ext_rounds,
                                        st,
                                        deg,
                                        &why,
                                    )?;
                                    continue 'chart;
                                }
                            }
                            st.nodes[node].status = "blown-up".into();
                            break 'machine Ok(());
                        }
                        CMove::Blow { cdelta } => {
                            for s in &preps {
                                st.nodes[node].preps.push(coord_change_json(s, &VARS3));
                            }
                            st.nodes[node].generators =
                                gens_c.iter().map(|g| poly_str(g, &VARS3)).collect();
                            st.nodes[node].certificates.insert("r".into(), r.to_string());
                            st.nodes[node]
                                .certificates
                                .insert("cdelta".into(), rat_str(&cdelta));
                            let path = extend_or_new(
                                st,
                                node,
                                coeff_chain_path,
                                "coeff-delta",
                                rat_str(&cdelta),
                            );
                            let sys = z_coefficients(&gens_c, r)?;
                            let anchored = sys
                                .items
                                .iter()
                                .any(|it| !it.a.coeff(&[0, it.s, 0]).is_zero());
                            check_center(&gens_c, r, Center::Origin, &div_c)?;
                            let machine = Machine::Coeff { anchored, cdelta, path };
                            let mut cx = Ctx { st, node, div: &div_c, field: &field, depth };
                            match blow_point(&mut cx, &gens_c, r, &machine)? {
                                Blown::Done => {}
                                Blown::Extend { deg, why } => {
                                    bump(
                                        &mut field,
                                        &mut gens,
                                        &mut div,
                                        &mut ext_rounds,
                                        st,
                                        deg,
                                        &why,
                                    )?;
                                    continue 'chart;
                                }
                            }
                            st.nodes[node].status = "blown-up".into();
                            break 'machine Ok(());
                        }
                    }
                    let _ = &prev_delta;
                    if budget == 0 {
                        break 'machine Err(Error::Budget(
                            "preparation budget exhausted in the weighted machine".into(),
                        ));
                    }
                    budget -= 1;
                }
            } else if eta >= 2 {
                // ---- configuration blow-ups shrink the component count
                let axes: Vec<usize> = div
                    .minus
                    .iter()
                    .filter(|c| c.poly.coeff(&[0, 0, 0]).is_zero())
                    .filter_map(|c| {
                        (0..3).find(|&kv| {
                            c.poly.terms.keys().all(|m| {
                                m.get(kv) == 1 && (0..3).all(|i| i == kv || m.get(i) == 0)
                            }) && !c.poly.terms.is_empty()
                        })
                    })
                    .collect();
                if axes.len() != eta {
                    break 'machine Err(Error::Unsupported(
                        "an old exceptional component through the origin is not a coordinate plane"
                            .into(),
                    ));
                }
                st.nodes[node].generators = gens.iter().map(|g| poly_str(g, &VARS3)).collect();
                st.nodes[node].certificates.insert("r".into(), r.to_string());
                st.nodes[node].certificates.insert("eta".into(), eta.to_string());
                let blown = if eta == 2 {
                    let (a, b) = (axes[0].min(axes[1]), axes[0].max(axes[1]));
                    if curve_in_sing(&gens, r, a, b)? {
                        st.nodes[node]
                            .certificates
                            .insert("eta-double-curve".into(), format!("(x{a}, x{b})"));
                        check_center(&gens, r, Center::Curve(a, b), &div)?;
                        let mut cx = Ctx { st, node, div: &div, field: &field, depth };
                        blow_curve(&mut cx, &gens, r, a, b, &Machine::EtaDouble)?
                    } else {
                        st.nodes[node].certificates.insert("eta-isolated".into(), "1".into());
                        check_center(&gens, r, Center::Origin, &div)?;
                        let mut cx = Ctx { st, node, div: &div, field: &field, depth };
                        blow_point(&mut cx, &gens, r, &Machine::EtaPattern)?
                    }
                } else {
                    st.nodes[node].certificates.insert("eta-reduction".into(), "1".into());
                    check_center(&gens, r, Center::Origin, &div)?;
                    let mut cx = Ctx { st, node, div: &div, field: &field, depth };
                    blow_point(&mut cx, &gens, r, &Machine::EtaPattern)?
                };
                match blown {
                    Blown::Done => {}
                    Blown::Extend { deg, why } => {
                        bump(&mut field, &mut gens, &mut div, &mut ext_rounds, st, deg, &why)?;
                        continue 'chart;
                    }
                }
                st.nodes[node].status = "blown-up".into();
                break 'machine Ok(());
            } else {
                // ---- the directrix machine
                let gp = match good_parameters(&gens, r) {
                    Ok(g) => g,
                    Err(e) => break 'machine Err(e),
                };
                let tau = gp.directrix.tau;
                st.nodes[node].tau = Some(tau);
                if !gp.directrix.certified_minimal {
                    break 'machine Err(Error::Uncertified(
                        "the directrix dimension was not certified minimal".into(),
                    ));
                }
                let mut gens_m = gp.gens;
                let mut div_m = div.clone();
                let mut preps: Vec<CoordChange> = gp.steps;
                for s in &preps {
                    div_m = div_m.map(&s.images)?;
                }

                // a τ jump ends γ- and Ω-chains as progress in itself
                if gamma_chain_path.is_some() && tau != 2 {
                    if tau < 2 {
                        break 'machine Err(Error::Internal(
                            "the directrix dimension dropped along a τ = 2 chain".into(),
                        ));
                    }
                    st.nodes[node].certificates.insert("tau-jump".into(), tau.to_string());
                    gamma_chain_path = None;
                }
                if let Some((_, _, _, _)) = &omega_chain {
                    if tau != 1 {
                        st.nodes[node]
                            .certificates
                            .insert("tau-jump".into(), tau.to_string());
                        omega_chain = None;
                    }
                }

                if tau == 3 {
                    for s in &preps {
                        st.nodes[node].preps.push(coord_change_json(s, &VARS3));
                    }
                    st.nodes[node].generators =
                        gens_m.iter().map(|g| poly_str(g, &VARS3)).collect();
                    st.nodes[node].certificates.insert("r".into(), r.to_string());
                    st.nodes[node].certificates.insert("tau3-terminal".into(), "1".into());
                    check_center(&gens_m, r, Center::Origin, &div_m)?;
                    let mut cx = Ctx { st, node, div: &div_m, field: &field, depth };
                    match blow_point(&mut cx, &gens_m, r, &Machine::Tau3)? {
                        Blown::Done => {}
                        Blown::Extend { deg, why } => {
                            bump(&mut field, &mut gens, &mut div, &mut ext_rounds, st, deg, &why)?;
                            continue 'chart;
                        }
                    }
                    st.nodes[node].status = "blown-up".into();
                    break 'machine Ok(());
                }

                if tau == 2 {
                    let mut budget = opts.budgets.max_prep;
                    let gamma = loop {
                        let Some(g) = certified_gamma(&gens_m, r)? else { break None };
                        if g < rat_u(1, 1) {
                            break 'machine Err(Error::Internal(
                                "γ below one at an order-r origin".into(),
                            ));
                        }
                        match tau2_solvable(&gens_m, r, &g)? {
                            Tau2Status::NotSolvable => break Some(g),
                            Tau2Status::Solvable { ca, cb } => {
                                let n = as_int(&g).ok_or_else(|| {
                                    Error::Internal("a solvable weighted form at fractional γ".into())
                                })?;
                                let mut images = identity3(&field);
                                images[0] = images[0].add(&Poly::monomial(
                                    field.clone(),
                                    3,
                                    &[0, 0, n],
                                    ca,
                                ));
                                images[1] = images[1].add(&Poly::monomial(
                                    field.clone(),
                                    3,
                                    &[0, 0, n],
                                    cb,
                                ));
                                let cc = CoordChange { images };
                                let moved = cc.apply(&gens_m)?;
                                let g2 = certified_gamma(&moved, r)?;
                                if g2.as_ref().map(|x| *x <= g).unwrap_or(false) {
                                    break 'machine Err(Error::Internal(
                                        "the weighted form survived its own recentering".into(),
                                    ));
                                }
                                div_m = div_m.map(&cc.images)?;
                                gens_m = moved;
                                preps.push(cc);
                                if budget == 0 {
                                    break 'machine Err(Error::Budget(
                                        "preparation budget exhausted at τ = 2".into(),
                                    ));
                                }
                                budget -= 1;
                            }
                        }
                    };
                    for s in &preps {
                        st.nodes[node].preps.push(coord_change_json(s, &VARS3));
                    }
                    st.nodes[node].generators =
                        gens_m.iter().map(|g| poly_str(g, &VARS3)).collect();
                    st.nodes[node].certificates.insert("r".into(), r.to_string());
                    match gamma {
                        None => {
                            st.nodes[node]
                                .certificates
                                .insert("tau2-curve".into(), "(x, y)".into());
                            check_center(&gens_m, r, Center::Curve(0, 1), &div_m)?;
                            let mut cx = Ctx { st, node, div: &div_m, field: &field, depth };
                            match blow_curve(&mut cx, &gens_m, r, 0, 1, &Machine::Tau2Curve)? {
                                Blown::Done => {}
                                Blown::Extend { deg, why } => {
                                    bump(
                                        &mut field,
                                        &mut gens,
                                        &mut div,
                                        &mut ext_rounds,
                                        st,
                                        deg,
                                        &why,
                                    )?;
                                    continue 'chart;
                                }
                            }
                        }
                        Some(g) => {
                            st.nodes[node].certificates.insert("gamma".into(), rat_str(&g));
                            let fresh = gamma_chain_path.is_none();
                            let path = extend_or_new(
                                st,
                                node,
                                gamma_chain_path,
                                "tau2-gamma",
                                rat_str(&g),
                            );
                            if fresh {
                                let predicted = g.floor().numer().to_u32().unwrap_or(0);
                                st.nodes[node].certificates.insert(
                                    "tau2-predicted-blowups".into(),
                                    predicted.to_string(),
                                );
                            }
                            check_center(&gens_m, r, Center::Origin, &div_m)?;
                            let machine = Machine::Tau2 { gamma: g.clone(), path };
                            let mut cx = Ctx { st, node, div: &div_m, field: &field, depth };
                            match blow_point(&mut cx, &gens_m, r, &machine)? {
                                Blown::Done => {}
                                Blown::Extend { deg, why } => {
                                    bump(
                                        &mut field,
                                        &mut gens,
                                        &mut div,
                                        &mut ext_rounds,
                                        st,
                                        deg,
                                        &why,
                                    )?;
                                    continue 'chart;
                                }
                            }
                            // when the far origin drops below r the final γ is
                            // recorded as the terminal entry of the path
                            let (gz, _) = point_blowup(&gens_m)?.remove(2);
                            if ideal_order(&gz)? < r {
                                let raw = certified_gamma(&gz, r)?;
                                let expected = g.clone() - Rat::one();
                                if raw.as_ref() == Some(&expected) {
                                    st.paths[path].records.push(rat_str(&expected));
                                    st.nodes[node]
                                        .certificates
                                        .insert("gamma-terminal".into(), rat_str(&expected));
                                } else {
                                    break 'machine Err(Error::Internal(
                                        "γ failed to drop by one at the terminal chart".into(),
                                    ));
                                }
                            }
                        }
                    }
                    st.nodes[node].status = "blown-up".into();
                    break 'machine Ok(());
                }

                // ---- τ = 1: the polygon machine
                let mut upstairs_budget = opts.budgets.max_prep;
                let vwp = loop {
                    let vwp = match very_well_prepare(&gens_m, r, &opts.budgets) {
                        Ok(v) => v,
                        Err(e) => break 'machine Err(e),
                    };
                    for s in &vwp.steps {
                        div_m = div_m.map(&s.images)?;
                    }
                    preps.extend(vwp.steps.iter().cloned());
                    gens_m = vwp.gens.clone();
                    if vwp.polygon.points.is_empty() {
                        break vwp;
                    }
                    let Some(inv) = vwp.inv.clone() else { break vwp };
                    let min_a =
                        vwp.polygon.points.iter().map(|p| p.0.clone()).min().unwrap_or_default();
                    if inv.beta.is_zero() && min_a < rat_u(1, 1) {
                        // an off-origin survivor on the strict line can be moved
                        // under the origin before blowing up
                        let (gx, tx) = point_blowup(&gens_m)?.remove(0);
                        if tx != r {
                            break 'machine Err(Error::Internal(
                                "the weak transform divided by a power different from the order"
                                    .into(),
                            ));
                        }
                        let line = sing_on_coordinate_line(&gx, r, 1)?;
                        if let Some(lf) = &line.leftover {
                            let deg = lf.deg().unwrap_or(2);
                            bump(
                                &mut field,
                                &mut gens,
                                &mut div,
                                &mut ext_rounds,
                                st,
                                deg,
                                "an order-r fibre point is irrational",
                            )?;
                            continue 'chart;
                        }
                        if let Some(c) = line.roots.iter().find(|c| !c.is_zero()) {
                            let cc = front3(&field, c, 1);
                            gens_m = cc.apply(&gens_m)?;
                            div_m = div_m.map(&cc.images)?;
                            preps.push(cc);
                            if upstairs_budget == 0 {
                                break 'machine Err(Error::Budget(
                                    "translation budget exhausted before the blow-up".into(),
                                ));
                            }
                            upstairs_budget -= 1;
                            continue;
                        }
                    }
                    break vwp;
                };
                for s in &preps {
                    st.nodes[node].preps.push(coord_change_json(s, &VARS3));
                }
                st.nodes[node].generators = gens_m.iter().map(|g| poly_str(g, &VARS3)).collect();
                st.nodes[node].certificates.insert("r".into(), r.to_string());

                if vwp.polygon.points.is_empty() {
                    // the whole ideal sits in (z^r): the r-fold surface splits
                    let quot = gens_m
                        .iter()
                        .map(|g| g.divide_by_mono(&[0, 0, r]))
                        .collect::<Result<Vec<_>>>()?;
                    let child_ord = ideal_order(&quot)?;
                    let axis = v(&field, 2);
                    let mut ndiv = div_m.clone();
                    if child_ord >= r {
                        ndiv.push_plus(axis.clone(), r);
                    } else {
                        let mut reset = DivisorRecord::empty();
                        for c in ndiv.plus.iter().chain(ndiv.minus.iter()) {
                            reset.push_minus(c.poly.clone(), c.mult);
                        }
                        reset.push_minus(axis.clone(), r);
                        ndiv = reset;
                    }
                    let child = st.child(node, vec![], None, &field);
                    let label = format!("({})^{}", poly_str(&axis, &VARS3), r);
                    st.nodes[child].certificates.insert("divided-by".into(), label.clone());
                    st.nodes[node].certificates.insert("surface-division".into(), label);
                    st.nodes[node].status = "divided".into();
                    st.queue.push_back(Item3 {
                        node: child,
                        gens: quot,
                        div: ndiv,
                        field: field.clone(),
                        depth: depth + 1,
                        global,
                        chain: None,
                    });
                    break 'machine Ok(());
                }
                let Some(inv) = vwp.inv.clone() else {
                    break 'machine Err(Error::Uncertified(
                        "the polygon invariants are not certified at this truncation".into(),
                    ));
                };
                st.nodes[node].polygon = Some(crate::trace::polygon_json(&vwp.polygon));
                st.nodes[node]
                    .certificates
                    .insert("vwp-case".into(), vwp_case_str(&vwp.case));
                st.nodes[node].certificates.insert("omega".into(), omega_str(&inv));

                // the Ω-law of the incoming edge, now that both ends are
                // very well prepared
                if let Some((path, kind, pomega, peps_finite)) = &omega_chain {
                    let child_o = omega_triple(&inv);
                    if child_o >= *pomega {
                        break 'machine Err(Error::Internal(
                            "Ω failed to decrease along the chain".into(),
                        ));
                    }
                    match kind {
                        OmegaKind::Tr1Zero => {
                            if child_o.0 == pomega.0
                                && *peps_finite
                                && child_o.1 != pomega.1
                                && child_o.1 != pomega.1.clone() - Rat::one()
                            {
                                break 'machine Err(Error::Internal(
                                    "1/ε failed to drop by exactly one".into(),
                                ));
                            }
                        }
                        OmegaKind::Tr1Eta | OmegaKind::Tr2 | OmegaKind::Tr4 => {
                            if child_o.0 >= pomega.0 {
                                break 'machine Err(Error::Internal(
                                    "β failed to decrease across the edge".into(),
                                ));
                            }
                        }
                        OmegaKind::Tr3 => {
                            if child_o.2 != pomega.2.clone() - Rat::one()
                                || child_o.0 != pomega.0
                                || child_o.1 != pomega.1
                            {
                                break 'machine Err(Error::Internal(
                                    "the α-law of the axis blow-up failed".into(),
                                ));
                            }
                        }
                    }
                    st.nodes[node]
                        .certificates
                        .insert("omega-law".into(), format!("{:?}", kind));
                    let _ = path;
                }

                let min_a =
                    vwp.polygon.points.iter().map(|p| p.0.clone()).min().unwrap_or_default();
                let min_b =
                    vwp.polygon.points.iter().map(|p| p.1.clone()).min().unwrap_or_default();
                let opath = omega_chain.as_ref().map(|(p, ..)| *p);
                let path =
                    extend_or_new(st, node, opath, "tau1-omega", omega_str(&inv));

                if min_a >= rat_u(1, 1) {
                    st.nodes[node].certificates.insert("tr".into(), "3".into());
                    check_center(&gens_m, r, Center::Curve(0, 2), &div_m)?;
                    let machine =
                        Machine::TrCurve { kind: OmegaKind::Tr3, inv: Box::new(inv), path };
                    let mut cx = Ctx { st, node, div: &div_m, field: &field, depth };
                    match blow_curve(&mut cx, &gens_m, r, 0, 2, &machine)? {
                        Blown::Done => {}
                        Blown::Extend { deg, why } => {
                            bump(&mut field, &mut gens, &mut div, &mut ext_rounds, st, deg, &why)?;
                            continue 'chart;
                        }
                    }
                } else if min_b >= rat_u(1, 1) {
                    st.nodes[node].certificates.insert("tr".into(), "4".into());
                    check_center(&gens_m, r, Center::Curve(1, 2), &div_m)?;
                    let machine =
                        Machine::TrCurve { kind: OmegaKind::Tr4, inv: Box::new(inv), path };
                    let mut cx = Ctx { st, node, div: &div_m, field: &field, depth };
                    match blow_curve(&mut cx, &gens_m, r, 1, 2, &machine)? {
                        Blown::Done => {}
                        Blown::Extend { deg, why } => {
                            bump(&mut field, &mut gens, &mut div, &mut ext_rounds, st, deg, &why)?;
                            continue 'chart;
                        }
                    }
                } else {
                    st.nodes[node].certificates.insert("tr".into(), "point".into());
                    check_center(&gens_m, r, Center::Origin, &div_m)?;
                    let machine = Machine::Tau1 { inv: Box::new(inv), path };
                    let mut cx = Ctx { st, node, div: &div_m, field: &field, depth };
                    match blow_point(&mut cx, &gens_m, r, &machine)? {
                        Blown::Done => {}
                        Blown::Extend { deg, why } => {
                            bump(&mut field, &mut gens, &mut div, &mut ext_rounds, st, deg, &why)?;
                            continue 'chart;
                        }
                    }
                }
                st.nodes[node].status = "blown-up".into();
                break 'machine Ok(());
            }
        };
        return match machine_res {
            Ok(()) => Ok(()),
            Err(Error::ExtensionNeeded(why)) => {
                bump(&mut field, &mut gens, &mut div, &mut ext_rounds, st, 2, &why)?;
                continue 'chart;
            }
            Err(e) => Err(e),
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fq::FqField;
    use crate::algebra::parse::parse_poly;
    use crate::trace::Outcome;

    fn q(s: &str) -> Poly {
        parse_poly(s, &VARS3, &Field::Q).unwrap()
    }

    fn fp(p: u64, s: &str) -> Poly {
        parse_poly(s, &VARS3, &Field::Fq(FqField::prime(p).unwrap())).unwrap()
    }

    fn run(gens: &[Poly]) -> Trace {
        let mut opts = ResolveOptions::exact();
        opts.allow_extension = true;
        resolve_3d(gens, &DivisorRecord::empty(), &opts).unwrap()
    }

    #[test]
    fn tau_three_cone_resolves_in_one_blowup() {
        let tr = run(&[q("x^2 + y^2 + z^2")]);
        assert_eq!(tr.outcome, Outcome::Success);
        assert_eq!(tr.nodes[0].tau, Some(3));
        assert!(tr.nodes[0].certificates.contains_key("tau3-terminal"));
        assert!(tr.nodes.iter().skip(1).all(|n| n.status == "resolved"));
    }

    #[test]
    fn tau_two_gamma_chain_matches_the_arithmetic() {
        let tr = run(&[q("x^2 + y^2 + z^5")]);
        assert_eq!(tr.outcome, Outcome::Success);
        let path = tr
            .paths
            .iter()
            .find(|p| p.kind == "tau2-gamma")
            .expect("a γ-descent path");
        assert_eq!(path.records, vec!["5/2", "3/2", "1/2"]);
        assert_eq!(
            tr.nodes[path.nodes[0]].certificates.get("tau2-predicted-blowups"),
            Some(&"2".to_string())
        );
    }

    #[test]
    fn tau_two_curve_case_blows_the_directrix_line() {
        let tr = run(&[q("x^2*z + y^2*z + x^3")]);
        // ⊆ (x,y)²: γ = ∞ at the origin, so the z-axis is the centre
        assert_eq!(tr.outcome, Outcome::Success);
        assert!(tr
            .nodes
            .iter()
            .any(|n| n.certificates.get("tau2-curve").is_some()));
    }

    #[test]
    fn whitney_umbrella_goes_through_the_axis_blowup() {
        let tr = run(&[fp(2, "z^2 + x^2*y")]);
        assert_eq!(tr.outcome, Outcome::Success);
        assert_eq!(
            tr.nodes[0].certificates.get("tr"),
            Some(&"3".to_string()),
            "min a ≥ 1 forces the V(x, z) blow-up first"
        );
        let path = tr.paths.iter().find(|p| p.kind == "tau1-omega").unwrap();
        assert!(!path.records.is_empty());
    }

    #[test]
    fn char_two_cusp_surface_descends_on_omega() {
        let tr = run(&[fp(2, "z^2 + x^3 + y^3")]);
        assert_eq!(tr.outcome, Outcome::Success);
        let path = tr.paths.iter().find(|p| p.kind == "tau1-omega").unwrap();
        assert!(path.records.len() >= 1);
        for n in &tr.nodes {
            if let Some(t) = n.tau {
                assert!(t >= 1);
            }
        }
    }

    #[test]
    fn principal_perfect_power_divides_and_resolves() {
        let tr = run(&[q("z^2 - 2*x^2*z + x^4")]);
        assert_eq!(tr.outcome, Outcome::Success);
        assert!(tr.nodes[0].certificates.get("division-kind").map(|s| s.as_str())
            == Some("perfect-power"));
    }

    #[test]
    fn plane_scan_sees_lines() {
        // y²z² − x²y³ is singular along both coordinate lines of the plane
        let gens = [q("y^2*z^2 - x^2*y^3")];
        let scan = plane_scan(&gens, 0).unwrap();
        assert!(scan.lines.contains(&(1usize, Field::Q.zero())));
        assert!(scan.lines.contains(&(2usize, Field::Q.zero())));
        assert!(scan.points.is_empty());
    }

    #[test]
    fn plane_scan_sees_an_isolated_point() {
        let gens = [q("z^2 - (y - 1)^3")];
        let scan = plane_scan(&gens, 0).unwrap();
        assert!(scan.lines.is_empty());
        assert_eq!(scan.points.len(), 1);
        assert!(scan.points[0][1] == Field::Q.one() && scan.points[0][2].is_zero());
    }

    #[test]
    fn global_scan_recenters_an_off_origin_point() {
        let tr = run(&[q("z^2 + (x - 1)^3 + y^4*(x - 1)")]);
        assert_eq!(tr.outcome, Outcome::Success);
        assert!(tr
            .nodes
            .iter()
            .any(|n| n.certificates.get("recenter").map(|s| s.contains("1")).unwrap_or(false)));
    }

    #[test]
    fn weighted_machine_follows_its_own_descent() {
        // build an η = 1 state by hand: the component z = 0 is recorded as an
        // old exceptional plane through an order-2 origin
        let mut div = DivisorRecord::empty();
        div.push_minus(q("z"), 1);
        let tr = resolve_3d(
            &[q("z^2 + y^2*z + x^3*y")],
            &div,
            &ResolveOptions::exact(),
        )
        .unwrap();
        assert_eq!(tr.outcome, Outcome::Success);
        assert!(tr.paths.iter().any(|p| p.kind == "coeff-delta"));
    }

    #[test]
    fn eta_two_double_curve_is_blown_up() {
        let mut div = DivisorRecord::empty();
        div.push_minus(q("y"), 1);
        div.push_minus(q("z"), 1);
        let tr = resolve_3d(&[q("z^2*y^2 + x^5*y*z")], &div, &ResolveOptions::exact()).unwrap();
        // the double curve V(y, z) carries the singularity
        assert!(tr
            .nodes
            .iter()
            .any(|n| n.certificates.contains_key("eta-double-curve"))
            || tr.outcome != Outcome::Success);
    }

    #[test]
    fn quadric_cylinder_splits_its_directrix_curve() {
        let tr = run(&[q("x^2 + z^2")]);
        assert_eq!(tr.outcome, Outcome::Success);
    }

    #[test]
    fn smooth_input_is_a_leaf() {
        let tr = run(&[q("z + x^2")]);
        assert_eq!(tr.outcome, Outcome::Success);
        assert_eq!(tr.nodes.len(), 1);
        assert_eq!(tr.nodes[0].status, "resolved");
    }
}
