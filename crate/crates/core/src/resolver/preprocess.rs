//! Reductions applied at an order-r origin before the point/curve machines
//! run, and the weighted coefficient system that drives the case of a single
//! old exceptional component through the origin.
//!
//! Divisorial reductions: when every generator is divisible by f^r for a
//! smooth hypersurface f (a coordinate plane, a recorded component, or the
//! root of a principal r-th power), blowing up V(f) is an isomorphism of the
//! chart and the transform divides the ideal by f^r. We fire as many rounds
//! as divisibility allows in one recorded move.
//!
//! Weighted system: with the old component straightened to z = 0, expand
//! every generator as Σ aᵢ(x,y)·zⁱ and carry aᵢ at level s = r − i. The
//! literal construction raises aᵢ to the power r!/s, which scales each
//! polygon ratio u/(s−v) by r!/s and nothing else, so working at level s
//! preserves all the decisions while avoiding factorial-degree polynomials.

use num::{One, Signed, ToPrimitive};

use crate::algebra::{Field, K, Ord3, Poly};
use crate::blowup::{divide_out_divisor, DivisorRecord};
use crate::polygon::{rat_u, Rat};
use crate::prepare::{divmod_in_var, pattern_eta, perfect_power_root};
use crate::{Error, Result};

/// One extracted hypersurface: `gens` are the divided generators, `f` the
/// hypersurface, `t` the power taken out (a multiple of r).
#[derive(Debug, Clone)]
pub struct Reduction {
    pub gens: Vec<Poly>,
    pub f: Poly,
    pub t: u32,
    pub kind: &'static str,
}

/// A variable v such that f = c·v + g with c a nonzero scalar and g free of
/// v; division by f in v then terminates degree by degree.
fn division_var(f: &Poly) -> Option<usize> {
    for k in 0..f.nvars {
        let mut lin = false;
        let mut ok = true;
        for (m, _) in &f.terms {
            let e = m.get(k);
            if e == 0 {
                continue;
            }
            if e == 1 && (0..f.nvars).all(|i| i == k || m.get(i) == 0) {
                lin = true;
            } else {
                ok = false;
                break;
            }
        }
        if ok && lin {
            return Some(k);
        }
    }
    None
}

fn divide_times(gens: &[Poly], f: &Poly, main: usize, t: u32) -> Result<Vec<Poly>> {
    let mut cur = gens.to_vec();
    for _ in 0..t {
        let mut next = Vec::with_capacity(cur.len());
        for g in &cur {
            let (q, rem) = divmod_in_var(g, f, main)?;
            if !rem.is_known_zero() {
                return Err(Error::Internal(
                    "a certified divisor division left a remainder".into(),
                ));
            }
            next.push(q);
        }
        cur = next;
    }
    Ok(cur)
}

/// Try one divisorial reduction. The caller loops until `None`.
pub fn surface_reduction(
    gens: &[Poly],
    div: &DivisorRecord,
    r: u32,
) -> Result<Option<Reduction>> {
    let field = gens[0].field.clone();
    let nv = gens[0].nvars;
    for k in 0..nv {
        let t = gens
            .iter()
            .map(|g| g.ord_along(&[k]).unwrap_or(0))
            .min()
            .unwrap_or(0);
        if t >= r {
            let tp = t - t % r;
            let mut exps = vec![0u32; nv];
            exps[k] = tp;
            let out: Vec<Poly> = gens
                .iter()
                .map(|g| g.divide_by_mono(&exps))
                .collect::<Result<_>>()?;
            return Ok(Some(Reduction {
                gens: out,
                f: Poly::var(field, nv, k),
                t: tp,
                kind: "coordinate-plane",
            }));
        }
    }
    for c in div.plus.iter().chain(div.minus.iter()) {
        let Some(k) = division_var(&c.poly) else { continue };
        let (q, t) = divide_out_divisor(gens, &c.poly, k)?;
        if t >= r {
            let tp = t - t % r;
            let out = if tp == t {
                q
            } else {
                divide_times(gens, &c.poly, k, tp)?
            };
            return Ok(Some(Reduction {
                gens: out,
                f: c.poly.clone(),
                t: tp,
                kind: "recorded-component",
            }));
        }
    }
    if gens.len() == 1 {
        for k in 0..nv {
            if let Some((psi, quot)) = perfect_power_root(&gens[0], r, k)? {
                let f = Poly::var(field.clone(), nv, k).add(&psi.neg());
                return Ok(Some(Reduction {
                    gens: vec![quot],
                    f,
                    t: r,
                    kind: "perfect-power",
                }));
            }
        }
    }
    Ok(None)
}

// ------------------------------------------------- weighted z-coefficients

#[derive(Debug, Clone)]
pub struct WItem {
    /// The coefficient of zⁱ, with z-exponent zero in every term.
    pub a: Poly,
    /// Its level s = r − i.
    pub s: u32,
    pub trunc: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct WSys {
    pub items: Vec<WItem>,
}

pub fn z_coefficients(gens: &[Poly], r: u32) -> Result<WSys> {
    let mut items = Vec::new();
    for g in gens {
        if g.nvars != 3 {
            return Err(Error::Internal("weighted system outside a 3-d chart".into()));
        }
        for i in 0..r {
            let mut a = Poly::zero(g.field.clone(), 3);
            for (m, c) in &g.terms {
                if m.get(2) == i {
                    a = a.add(&Poly::monomial(
                        g.field.clone(),
                        3,
                        &[m.get(0), m.get(1), 0],
                        c.clone(),
                    ));
                }
            }
            if a.is_known_zero() {
                continue;
            }
            a.trunc = g.trunc.map(|t| t.saturating_sub(i));
            items.push(WItem { a: a.clone(), s: r - i, trunc: a.trunc });
        }
    }
    Ok(WSys { items })
}

/// min over items and terms (u, v) with v < s of u/(s − v); `None` when every
/// item sits inside (y^s). Hidden terms of an item satisfy u + v > t, hence
/// u/(s−v) > (t+1−v)/(s−v) ≥ (t+1)/s, so the minimum is certified against
/// each item's truncation bound exactly as in the plane machine.
pub fn w_delta(sys: &WSys) -> Result<Option<Rat>> {
    let mut d: Option<Rat> = None;
    for it in &sys.items {
        for (m, _) in &it.a.terms {
            let (u, v) = (m.get(0), m.get(1));
            if v < it.s {
                let q = rat_u(u, it.s - v);
                if d.as_ref().map_or(true, |cur| q < *cur) {
                    d = Some(q);
                }
            }
        }
    }
    if let Some(d) = &d {
        for it in &sys.items {
            if let Some(t) = it.trunc {
                if t + 1 < it.s || *d > rat_u(t + 1, it.s) {
                    return Err(Error::Truncation(
                        "the weighted minimum is not certified at this truncation bound".into(),
                    ));
                }
            }
        }
    }
    Ok(d)
}

fn as_int(r: &Rat) -> Option<u32> {
    if r.denom().is_one() && !r.numer().is_negative() {
        r.numer().to_u32()
    } else {
        None
    }
}

/// The decision of the weighted machine at an order-r origin whose old
/// component is z = 0.
#[derive(Debug, Clone, PartialEq)]
pub enum CMove {
    /// Every item lies in (y^s): V(y, z) is an r-fold curve.
    CurveYZ,
    /// Every item lies in (x^s): exchange x and y and re-decide.
    Swap,
    /// x ← x + t·y anchors some tight item at the y^s coefficient.
    Shear(K),
    /// The integer front is a single shifted power: y ← y + η·xⁿ removes it.
    Translate { eta: K, n: u32 },
    /// Nothing movable: blow up the origin carrying the weighted minimum.
    Blow { cdelta: Rat },
}

pub fn c_move(gens: &[Poly], r: u32) -> Result<CMove> {
    let field = gens[0].field.clone();
    let sys = z_coefficients(gens, r)?;
    if sys.items.is_empty() {
        return Err(Error::Internal(
            "the exceptional component survived surface reduction".into(),
        ));
    }
    let Some(delta) = w_delta(&sys)? else {
        return Ok(CMove::CurveYZ);
    };
    if sys
        .items
        .iter()
        .all(|it| it.a.terms.keys().all(|m| m.get(0) >= it.s))
    {
        return Ok(CMove::Swap);
    }
    if delta < rat_u(1, 1) {
        return Err(Error::Internal(
            "weighted minimum below one at an order-r origin".into(),
        ));
    }

    let anchored = sys
        .items
        .iter()
        .any(|it| !it.a.coeff(&[0, it.s, 0]).is_zero());
    if !anchored {
        // Only items attaining their level can be anchored by a linear move;
        // when none exists the front can never solve and we fall through.
        let mut tights = Vec::new();
        for it in &sys.items {
            if it.a.order() == Ord3::Finite(it.s) {
                tights.push((it.a.leading_form(it.s)?, it.s));
            }
        }
        if !tights.is_empty() {
            let cands: Vec<K> = match &field {
                Field::Q => {
                    let top = tights.iter().map(|(_, s)| *s).max().unwrap_or(1);
                    (1..=top as i64 + 1).map(|t| field.from_i64(t)).collect()
                }
                Field::Fq(_) => field
                    .elements()?
                    .into_iter()
                    .filter(|k| !k.is_zero())
                    .collect(),
            };
            for t in &cands {
                let pt = [t.clone(), field.one(), field.zero()];
                if tights.iter().any(|(l, _)| !l.eval(&pt).is_zero()) {
                    return Ok(CMove::Shear(t.clone()));
                }
            }
            if tights.iter().any(|(l, s)| !l.coeff(&[*s, 0, 0]).is_zero()) {
                return Ok(CMove::Swap);
            }
            return Err(Error::ExtensionNeeded(
                "every shear parameter in the base field misses the weighted leading forms"
                    .into(),
            ));
        }
    }

    if let Some(n) = as_int(&delta) {
        let mut etas: Vec<K> = Vec::new();
        let mut solvable = true;
        for it in &sys.items {
            let lead = it.a.coeff(&[0, it.s, 0]);
            let mut c = vec![field.zero(); it.s as usize + 1];
            let mut any = !lead.is_zero();
            for (m, k) in &it.a.terms {
                let v = m.get(1);
                if v < it.s {
                    let lam = it.s - v;
                    if m.get(0) == n * lam {
                        c[lam as usize] = k.clone();
                        any = true;
                    }
                }
            }
            if !any {
                continue;
            }
            if let Some(t) = it.trunc {
                if t < n * it.s {
                    return Err(Error::Truncation(
                        "the weighted front reaches the truncation bound".into(),
                    ));
                }
            }
            match pattern_eta(&field, it.s, &[(lead, c)])? {
                Some(e) => etas.push(e),
                None => {
                    solvable = false;
                    break;
                }
            }
        }
        if solvable && !etas.is_empty() && etas.iter().all(|e| *e == etas[0]) {
            return Ok(CMove::Translate { eta: etas[0].clone(), n });
        }
    }
    Ok(CMove::Blow { cdelta: delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fq::FqField;
    use crate::algebra::parse::parse_poly;
    use crate::blowup::DivisorRecord;
    use crate::polygon::rat;
    use std::sync::Arc;

    const V3: [&str; 3] = ["x", "y", "z"];

    fn q(s: &str) -> Poly {
        parse_poly(s, &V3, &Field::Q).unwrap()
    }

    fn fp(p: u64, s: &str) -> Poly {
        parse_poly(s, &V3, &Field::Fq(FqField::prime(p).unwrap())).unwrap()
    }

    #[test]
    fn reduction_divides_a_coordinate_plane() {
        let red = surface_reduction(&[q("z^2 + x*z^2")], &DivisorRecord::empty(), 2)
            .unwrap()
            .unwrap();
        assert_eq!(red.kind, "coordinate-plane");
        assert_eq!(red.t, 2);
        assert_eq!(red.gens[0], q("1 + x"));
    }

    #[test]
    fn reduction_keeps_the_residual_power_below_r() {
        // z⁵·u at r = 2 divides out z⁴ and leaves one factor in place.
        let red = surface_reduction(&[q("z^5 + x*z^5")], &DivisorRecord::empty(), 2)
            .unwrap()
            .unwrap();
        assert_eq!(red.t, 4);
        assert_eq!(red.gens[0], q("z + x*z"));
    }

    #[test]
    fn reduction_extracts_a_principal_perfect_power() {
        let red = surface_reduction(&[q("z^2 - 2*x^2*z + x^4")], &DivisorRecord::empty(), 2)
            .unwrap()
            .unwrap();
        assert_eq!(red.kind, "perfect-power");
        assert_eq!(red.f, q("z - x^2"));
        assert_eq!(red.t, 2);
        assert!(red.gens[0].order() == Ord3::Finite(0));
    }

    #[test]
    fn reduction_divides_a_recorded_shifted_component() {
        let mut div = DivisorRecord::empty();
        div.push_minus(q("y + 1"), 1);
        let red = surface_reduction(&[q("y^2*z + 2*y*z + z")], &div, 2)
            .unwrap()
            .unwrap();
        assert_eq!(red.kind, "recorded-component");
        assert_eq!(red.t, 2);
        assert_eq!(red.gens[0], q("z"));
    }

    #[test]
    fn reduction_passes_on_an_honest_singularity() {
        assert!(surface_reduction(&[q("z^2 + x^3")], &DivisorRecord::empty(), 2)
            .unwrap()
            .is_none());
    }

    #[test]
    fn z_coefficients_carry_levels_and_truncation() {
        let mut g = q("z^3 + x^2*z + y^5");
        g.trunc = Some(10);
        let sys = z_coefficients(&[g], 3).unwrap();
        assert_eq!(sys.items.len(), 2);
        assert_eq!(sys.items[0].s, 3);
        assert_eq!(sys.items[0].a.terms, q("y^5").terms);
        assert_eq!(sys.items[0].trunc, Some(10));
        assert_eq!(sys.items[1].s, 2);
        assert_eq!(sys.items[1].a.terms, q("x^2").terms);
        assert_eq!(sys.items[1].trunc, Some(9));
    }

    #[test]
    fn weighted_minimum_across_levels() {
        let sys = z_coefficients(&[q("z^3 + x^2*z + y^5")], 3).unwrap();
        assert_eq!(w_delta(&sys).unwrap(), Some(rat(1, 1)));
    }

    #[test]
    fn weighted_minimum_is_infinite_inside_the_y_power() {
        let sys = z_coefficients(&[q("z^2 + y^3 + y^2*z")], 2).unwrap();
        assert_eq!(w_delta(&sys).unwrap(), None);
    }

    #[test]
    fn weighted_minimum_checks_the_truncation_bound() {
        let mut g = q("z^2 + x^5");
        g.trunc = Some(5);
        let sys = z_coefficients(&[g.clone()], 2).unwrap();
        assert_eq!(w_delta(&sys).unwrap(), Some(rat(5, 2)));
        g.trunc = Some(3);
        let sys = z_coefficients(&[g], 2).unwrap();
        assert!(matches!(w_delta(&sys), Err(Error::Truncation(_))));
    }

    #[test]
    fn move_is_the_curve_when_everything_sits_in_the_y_power() {
        assert_eq!(c_move(&[q("z^2 + y^3")], 2).unwrap(), CMove::CurveYZ);
    }

    #[test]
    fn move_swaps_when_everything_sits_in_the_x_power() {
        assert_eq!(c_move(&[q("z^2 + x^3")], 2).unwrap(), CMove::Swap);
    }

    #[test]
    fn move_shears_to_anchor_a_tight_coefficient() {
        match c_move(&[q("z^2 + x^2 + x*y")], 2).unwrap() {
            CMove::Shear(t) => assert!(!t.is_zero()),
            m => panic!("expected a shear, got {:?}", m),
        }
    }

    #[test]
    fn move_translates_a_solvable_front() {
        match c_move(&[q("z^2 + y^2 - 2*x^3*y + x^6")], 2).unwrap() {
            CMove::Translate { eta, n } => {
                assert_eq!(n, 3);
                assert_eq!(eta, Field::Q.from_i64(1));
            }
            m => panic!("expected a translation, got {:?}", m),
        }
    }

    #[test]
    fn move_blows_up_on_a_fractional_minimum() {
        assert_eq!(
            c_move(&[q("z^2 + y^2 + x^3")], 2).unwrap(),
            CMove::Blow { cdelta: rat(3, 2) }
        );
    }

    #[test]
    fn move_blows_up_an_unsolvable_integer_front() {
        // No item attains its level, so no anchor exists and the front with
        // a missing lead cannot solve.
        assert_eq!(
            c_move(&[q("z^2 + x^2*y + x*y^3")], 2).unwrap(),
            CMove::Blow { cdelta: rat(2, 1) }
        );
    }

    #[test]
    fn solvable_front_in_characteristic_two() {
        // (y + x²)² = y² + x⁴ over F₂: the cross term vanishes but the p-th
        // root pattern still recovers η = 1.
        match c_move(&[fp(2, "z^3 + y^2*z + x^4*z")], 3).unwrap() {
            CMove::Translate { eta, n } => {
                assert_eq!(n, 2);
                assert!(!eta.is_zero());
            }
            m => panic!("expected a translation, got {:?}", m),
        }
    }

    #[test]
    fn front_truncation_is_reported() {
        // The weighted minimum itself is certified, but the far end of the
        // integer front sits beyond the truncation bound.
        let mut g = q("z^2 + x^2*y + x*y^3");
        g.trunc = Some(3);
        assert!(matches!(c_move(&[g], 2), Err(Error::Truncation(_))));
    }
}
