//! The Newton polygon of an ideal with respect to parameters (x, y, z) and
//! its numerical invariants.
//!
//! A term b·x^i y^j z^k of a generator with k < r contributes the rational
//! point (i/(r−k), j/(r−k)). The polygon |Δ| is the convex hull of those
//! points plus the positive quadrant as recession cone; since monomial
//! multiples only move points up-right or outward along rays, generators of
//! the ideal already produce the full polygon and all of its vertices.
//!
//! With a truncation bound D on the generators, every unknown term satisfies
//! i + j + k > D, hence lands at a + b > D/r; reads of invariants whose
//! defining vertex falls outside the certified region a + b ≤ D/r fail
//! instead of returning a guess.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use serde_json::json;

use crate::algebra::poly::Poly;
use crate::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_u(n: u32, d: u32) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical "p/q" (or integer) text for trace output.
pub fn rat_str(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    /// Pareto-minimal generating points, ascending in a (b strictly descending).
    pub points: Vec<(Rat, Rat)>,
    /// Hull vertices, ascending in a.
    pub vertices: Vec<(Rat, Rat)>,
    /// a + b ≤ cert_bound is fully known; None when generators were exact.
    pub cert_bound: Option<Rat>,
}

/// The four monoidal transformations of the τ=1 state machine, as they act
/// on polygon points. Tr1 with η ≠ 0 is a composite (translation upstairs
/// followed by the η = 0 map), so only its η = 0 form has an affine σ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrKind {
    Tr1,
    Tr2,
    Tr3,
    Tr4,
}

/// σ: how a polygon point of the parent maps to the child chart.
pub fn sigma_point(kind: TrKind, p: &(Rat, Rat)) -> (Rat, Rat) {
    let one = BigRational::one();
    match kind {
        TrKind::Tr1 => (&p.0 + &p.1 - one, p.1.clone()),
        TrKind::Tr2 => (p.0.clone(), &p.0 + &p.1 - one),
        TrKind::Tr3 => (&p.0 - one, p.1.clone()),
        TrKind::Tr4 => (p.0.clone(), &p.1 - one),
    }
}

impl Polygon {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn certified(&self, p: &(Rat, Rat)) -> bool {
        match &self.cert_bound {
            None => true,
            Some(c) => &p.0 + &p.1 <= *c,
        }
    }

    fn need_certified(&self, p: &(Rat, Rat), what: &str) -> Result<()> {
        if self.certified(p) {
            Ok(())
        } else {
            Err(Error::Uncertified(format!(
                "{} read at ({}, {}) beyond certified bound",
                what,
                rat_str(&p.0),
                rat_str(&p.1)
            )))
        }
    }

    /// Empty with no truncation in play: the ideal genuinely lies in (z)^r.
    pub fn known_empty(&self) -> bool {
        self.points.is_empty() && self.cert_bound.is_none()
    }

    pub fn invariants(&self) -> Result<Invariants> {
        if self.vertices.is_empty() {
            return Err(if self.cert_bound.is_some() {
                Error::Uncertified("no polygon points within the certified region".into())
            } else {
                Error::Internal("invariants of an empty polygon".into())
            });
        }
        let first = &self.vertices[0];
        self.need_certified(first, "alpha/beta vertex")?;
        let alpha = first.0.clone();
        let beta = first.1.clone();
        let gamma = self
            .vertices
            .iter()
            .map(|(a, b)| a + b)
            .min()
            .unwrap();
        let gv = self
            .vertices
            .iter()
            .filter(|(a, b)| a + b == gamma)
            .min_by(|x, y| x.1.cmp(&y.1))
            .unwrap()
            .clone();
        self.need_certified(&gv, "gamma/delta vertex")?;
        let delta = gv.1.clone();
        // steepest descent from the (α, β) vertex to any lower point
        let mut eps: Option<Rat> = None;
        let mut eps_at: Option<(Rat, Rat)> = None;
        for (a, b) in &self.points {
            if *a > alpha && *b < beta {
                let slope = (&beta - b) / (a - &alpha);
                if eps.as_ref().map(|e| slope > *e).unwrap_or(true) {
                    eps = Some(slope);
                    eps_at = Some((a.clone(), b.clone()));
                }
            }
        }
        if let Some(pt) = &eps_at {
            self.need_certified(pt, "epsilon point")?;
        }
        // With a single (bottom) vertex, ε = ∞ by convention and 1/ε = 0;
        // under truncation this is a convention-level read: no known point
        // lies below β.
        let inv_eps = match &eps {
            None => BigRational::zero(),
            Some(e) => e.recip(),
        };
        let omega = Omega(beta.clone(), inv_eps, alpha.clone());
        Ok(Invariants { alpha, beta, gamma, delta, eps, omega })
    }

    /// Map the polygon through σ and rebuild the hull (verifier tool).
    pub fn map_sigma(&self, kind: TrKind) -> Polygon {
        let pts: Vec<(Rat, Rat)> =
            self.points.iter().map(|p| sigma_point(kind, p)).collect();
        let cert = self.cert_bound.as_ref().map(|c| match kind {
            // a + b transforms per σ; the exact child bound is recomputed
            // from child generators anyway — keep a conservative bound.
            TrKind::Tr1 | TrKind::Tr2 => c + c - BigRational::one(),
            TrKind::Tr3 | TrKind::Tr4 => c - BigRational::one(),
        });
        from_points(pts, cert)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pair = |p: &(Rat, Rat)| json!([rat_str(&p.0), rat_str(&p.1)]);
        json!({
            "points": self.points.iter().map(pair).collect::<Vec<_>>(),
            "vertices": self.vertices.iter().map(pair).collect::<Vec<_>>(),
            "cert_bound": self.cert_bound.as_ref().map(|c| rat_str(c)),
        })
    }
}

/// Numerical invariants of a nonempty polygon. Ω = (β, 1/ε, α) decreases
/// lexicographically along the blow-up sequences of the τ = 1 machine, with
/// 1/∞ read as 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub alpha: Rat,
    pub beta: Rat,
    pub gamma: Rat,
    pub delta: Rat,
    /// None encodes ε = ∞ (single/bottom-vertex polygon).
    pub eps: Option<Rat>,
    pub omega: Omega,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Omega(pub Rat, pub Rat, pub Rat);

impl Omega {
    pub fn to_json(&self) -> serde_json::Value {
        json!([rat_str(&self.0), rat_str(&self.1), rat_str(&self.2)])
    }
}

fn dedup_sorted(mut pts: Vec<(Rat, Rat)>) -> Vec<(Rat, Rat)> {
    pts.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)));
    pts.dedup();
    pts
}

/// Build a polygon from raw points: Pareto-filter, then the lower-left
/// convex chain with the positive quadrant as recession cone.
pub fn from_points(pts: Vec<(Rat, Rat)>, cert_bound: Option<Rat>) -> Polygon {
    let pts = dedup_sorted(pts);
    // Pareto frontier: scanning with ascending a, keep strictly new minima in b.
    let mut frontier: Vec<(Rat, Rat)> = Vec::new();
    for p in pts {
        match frontier.last() {
            Some(last) if p.1 >= last.1 => {}
            _ => frontier.push(p),
        }
    }
    // Lower-left hull: drop middle points that are on or above the segment
    // joining their neighbours.
    let mut hull: Vec<(Rat, Rat)> = Vec::new();
    for p in &frontier {
        while hull.len() >= 2 {
            let p1 = &hull[hull.len() - 2];
            let p2 = &hull[hull.len() - 1];
            // keep p2 only if the slopes strictly increase through it
            // (boundary convex towards the quadrant); cross ≤ 0 means p2 is
            // on or above the segment p1—p and is not a vertex
            let cross = (&p2.0 - &p1.0) * (&p.1 - &p1.1) - (&p2.1 - &p1.1) * (&p.0 - &p1.0);
            if cross <= BigRational::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    Polygon { points: frontier, vertices: hull, cert_bound }
}

/// Δ(I; x, y, z) from chart generators: one point per term with z-exponent
/// below r, over every generator. `r` is ν of the ideal; good parameters are
/// the caller's responsibility (the polygon itself is defined regardless).
/// An empty polygon means I ⊆ (z)^r — the surface-in-Sing_r situation.
pub fn build_delta(gens: &[Poly], r: u32) -> Result<Polygon> {
    if r == 0 {
        return Err(Error::Internal("polygon at r = 0".into()));
    }
    let mut pts = Vec::new();
    let mut cert: Option<Rat> = None;
    for g in gens {
        assert_eq!(g.nvars, 3, "polygon expects a 3-variable chart");
        if let Some(d) = g.trunc {
            let c = rat_u(d, r);
            cert = Some(match cert {
                None => c,
                Some(old) => old.min(c),
            });
        }
        for (m, _) in &g.terms {
            let k = m.get(2);
            if k >= r {
                continue;
            }
            let den = r - k;
            pts.push((rat_u(m.get(0), den), rat_u(m.get(1), den)));
        }
    }
    Ok(from_points(pts, cert))
}

/// 2-d order invariant δ(f; x, y) = min{ i/(r−j) : j < r, a_ij ≠ 0 } over
/// the generators; None encodes δ = ∞, i.e. I ⊆ (y^r).
pub fn delta_2d(gens: &[Poly], r: u32) -> Option<Rat> {
    let mut best: Option<Rat> = None;
    for g in gens {
        assert_eq!(g.nvars, 2, "delta_2d expects a 2-variable chart");
        for (m, _) in &g.terms {
            let j = m.get(1);
            if j >= r {
                continue;
            }
            let v = rat_u(m.get(0), r - j);
            if best.as_ref().map(|b| v < *b).unwrap_or(true) {
                best = Some(v);
            }
        }
    }
    best
}

/// τ = 2 weight: γ(g; x, y, z) = min{ k/(r−(i+j)) : i+j < r, b_ijk ≠ 0 },
/// minimised over the generators; None encodes γ = ∞, i.e. I ⊆ (x, y)^r.
pub fn gamma_tau2(gens: &[Poly], r: u32) -> Option<Rat> {
    let mut best: Option<Rat> = None;
    for g in gens {
        assert_eq!(g.nvars, 3, "gamma_tau2 expects a 3-variable chart");
        for (m, _) in &g.terms {
            let ij = m.get(0) + m.get(1);
            if ij >= r {
                continue;
            }
            let v = rat_u(m.get(2), r - ij);
            if best.as_ref().map(|b| v < *b).unwrap_or(true) {
                best = Some(v);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::coeff::Field;
    use crate::algebra::parse::parse_poly;

    fn q(src: &str) -> Poly {
        parse_poly(src, &["x", "y", "z"], &Field::Q).unwrap()
    }

    fn q2(src: &str) -> Poly {
        parse_poly(src, &["x", "y"], &Field::Q).unwrap()
    }

    #[test]
    fn whitney_polygon() {
        let p = build_delta(&[q("z^2 - x^2*y")], 2).unwrap();
        assert_eq!(p.vertices, vec![(rat(1, 1), rat(1, 2))]);
        let inv = p.invariants().unwrap();
        assert_eq!(inv.alpha, rat(1, 1));
        assert_eq!(inv.beta, rat(1, 2));
        assert_eq!(inv.eps, None);
        assert_eq!(inv.omega, Omega(rat(1, 2), rat(0, 1), rat(1, 1)));
    }

    #[test]
    fn two_vertex_polygon() {
        let p = build_delta(&[q("z^2 + x^3*y + x*y^3")], 2).unwrap();
        assert_eq!(
            p.vertices,
            vec![(rat(1, 2), rat(3, 2)), (rat(3, 2), rat(1, 2))]
        );
        let inv = p.invariants().unwrap();
        assert_eq!(inv.alpha, rat(1, 2));
        assert_eq!(inv.beta, rat(3, 2));
        assert_eq!(inv.gamma, rat(2, 1));
        assert_eq!(inv.delta, rat(1, 2));
        assert_eq!(inv.eps, Some(rat(1, 1)));
        assert_eq!(inv.omega, Omega(rat(3, 2), rat(1, 1), rat(1, 2)));
    }

    #[test]
    fn empty_polygon_flags_surface_case() {
        let p = build_delta(&[q("z^2")], 2).unwrap();
        assert!(p.is_empty());
        assert!(p.invariants().is_err());
    }

    #[test]
    fn dominated_points_do_not_make_vertices() {
        let pts = vec![
            (rat(1, 2), rat(3, 2)),
            (rat(3, 2), rat(1, 2)),
            (rat(2, 1), rat(2, 1)), // dominated
            (rat(1, 1), rat(1, 1)), // on the edge between the two vertices
        ];
        let p = from_points(pts, None);
        assert_eq!(
            p.vertices,
            vec![(rat(1, 2), rat(3, 2)), (rat(3, 2), rat(1, 2))]
        );
        // the edge point survives Pareto filtering but is not a vertex
        assert_eq!(p.points.len(), 3);
    }

    #[test]
    fn hull_detects_strict_convexity() {
        let pts = vec![
            (rat(0, 1), rat(2, 1)),
            (rat(1, 1), rat(1, 2)), // below the segment (0,2)-(2,0): a vertex
            (rat(2, 1), rat(0, 1)),
        ];
        let p = from_points(pts, None);
        assert_eq!(p.vertices.len(), 3);
        let pts2 = vec![
            (rat(0, 1), rat(2, 1)),
            (rat(1, 1), rat(3, 2)), // above the segment: not a vertex
            (rat(2, 1), rat(0, 1)),
        ];
        let p2 = from_points(pts2, None);
        assert_eq!(p2.vertices.len(), 2);
    }

    #[test]
    fn sigma_maps_match_hand_computation() {
        let v = (rat(3, 2), rat(1, 2));
        assert_eq!(sigma_point(TrKind::Tr1, &v), (rat(1, 1), rat(1, 2)));
        assert_eq!(sigma_point(TrKind::Tr2, &v), (rat(3, 2), rat(1, 1)));
        assert_eq!(sigma_point(TrKind::Tr3, &v), (rat(1, 2), rat(1, 2)));
        assert_eq!(sigma_point(TrKind::Tr4, &v), (rat(3, 2), rat(-1, 2)));
    }

    #[test]
    fn certification_gates_reads() {
        let f = q("z^2 + x^3*y + x*y^3").jet(3);
        let p = build_delta(&[f], 2).unwrap();
        assert_eq!(p.cert_bound, Some(rat(3, 2)));
        // vertices sit at a+b = 2 > 3/2: reads must fail
        assert!(matches!(p.invariants(), Err(Error::Uncertified(_))));
        let f = q("z^2 + x^3*y + x*y^3").jet(10);
        let p = build_delta(&[f], 2).unwrap();
        assert!(p.invariants().is_ok());
    }

    #[test]
    fn delta_2d_values() {
        assert_eq!(delta_2d(&[q2("y^2 - x^3")], 2), Some(rat(3, 2)));
        assert_eq!(delta_2d(&[q2("y^2")], 2), None);
        assert_eq!(delta_2d(&[q2("y^2 - x^4")], 2), Some(rat(2, 1)));
        assert_eq!(delta_2d(&[q2("y^3 - x^5")], 3), Some(rat(5, 3)));
    }

    #[test]
    fn gamma_tau2_values() {
        assert_eq!(gamma_tau2(&[q("x^2 + y^2 + z^5")], 2), Some(rat(5, 2)));
        assert_eq!(gamma_tau2(&[q("x^2 + y^2")], 2), None);
        assert_eq!(gamma_tau2(&[q("x^2 + y^2 + z^2")], 2), Some(rat(1, 1)));
    }

    #[test]
    fn json_round_trip_shape() {
        let p = build_delta(&[q("z^2 + x^3*y + x*y^3")], 2).unwrap();
        let v = p.to_json();
        assert_eq!(v["vertices"][0][0], "1/2");
        assert_eq!(v["vertices"][0][1], "3/2");
        assert!(v["cert_bound"].is_null());
    }
}
