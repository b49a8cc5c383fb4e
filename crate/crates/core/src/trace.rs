//! Canonical JSON traces. Every resolution run emits a complete, replayable
//! record: one node per chart with its substitution edge, preparation steps,
//! generators, invariants and divisor record, plus descent paths tying the
//! per-node invariant records together. Serialization is canonical — field
//! order is fixed by the struct definitions, map keys are sorted, rationals
//! print as `p/q` and finite-field elements as polynomials in `t` — so a
//! trace round-trips byte-identically.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::coeff::Field;
use crate::algebra::fq::FqField;
use crate::algebra::parse::{parse_fp_poly, parse_poly, print_poly};
use crate::algebra::poly::{Ord3, Poly};
use crate::blowup::DivisorRecord;
use crate::polygon::{rat_str, Polygon};
use crate::singular::CoordChange;
use crate::{Error, Result};

pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub version: u32,
    pub job: JobMeta,
    pub nodes: Vec<TraceNode>,
    pub paths: Vec<DescentPath>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobMeta {
    pub field: FieldJson,
    pub vars: Vec<String>,
    pub generators: Vec<String>,
    pub mode: String,
    pub trunc: Option<u32>,
}

/// A coefficient field, replayably: characteristic 0 means Q; degree > 1
/// carries the minimal polynomial of the generator t over F_p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    pub characteristic: u64,
    pub degree: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_poly: Option<String>,
}

fn fp_poly_str(coeffs: &[u64]) -> String {
    let mut parts = Vec::new();
    for (e, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let body = match e {
            0 => format!("{}", c),
            1 if c == 1 => "t".into(),
            1 => format!("{}*t", c),
            _ if c == 1 => format!("t^{}", e),
            _ => format!("{}*t^{}", c, e),
        };
        parts.push(body);
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

impl FieldJson {
    pub fn of(field: &Field) -> FieldJson {
        match field {
            Field::Q => FieldJson { characteristic: 0, degree: 1, min_poly: None },
            Field::Fq(fq) => FieldJson {
                characteristic: fq.p,
                degree: fq.k as u32,
                min_poly: if fq.k > 1 { Some(fp_poly_str(&fq.min_poly)) } else { None },
            },
        }
    }

    pub fn to_field(&self) -> Result<Field> {
        if self.characteristic == 0 {
            return Ok(Field::Q);
        }
        let fq: Arc<FqField> = match (&self.min_poly, self.degree) {
            (None, 1) => FqField::prime(self.characteristic)?,
            (None, k) => FqField::extension(self.characteristic, k as usize)?,
            (Some(mp), _) => {
                let coeffs = parse_fp_poly(mp, self.characteristic)?;
                FqField::with_min_poly(self.characteristic, coeffs)?
            }
        };
        Ok(Field::Fq(fq))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceNode {
    pub id: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parent: Option<usize>,
    /// Parent variables as polynomials in this chart's variables; empty for
    /// the root.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub substitution: Vec<String>,
    /// Power of the exceptional variable divided out of the pullback.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub divided: Option<u32>,
    /// Coordinate changes applied after arrival (preparation, recentering),
    /// each as a full image list, in order.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub preps: Vec<Vec<String>>,
    /// Generators after the preps, in this chart's coordinates.
    pub generators: Vec<String>,
    /// Set when the coefficient field was extended at this node; the new
    /// field applies to this node and its whole subtree.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub field: Option<FieldJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trunc: Option<u32>,
    pub nu: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tau: Option<u32>,
    pub divisors: DivisorsJson,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub polygon: Option<PolygonJson>,
    /// Free-form certificates: vwp case, solvability etas, survivor
    /// evidence, descent assertions. Keys are sorted (BTreeMap).
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub certificates: BTreeMap<String, String>,
    pub status: String,
}

impl TraceNode {
    /// A fresh node; the driver fills the rest in as it works the chart.
    pub fn skeleton(id: usize, parent: Option<usize>) -> TraceNode {
        TraceNode {
            id,
            parent,
            substitution: vec![],
            divided: None,
            preps: vec![],
            generators: vec![],
            field: None,
            trunc: None,
            nu: String::new(),
            tau: None,
            divisors: DivisorsJson::default(),
            polygon: None,
            certificates: BTreeMap::new(),
            status: "open".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DivisorsJson {
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub plus: Vec<CompJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub minus: Vec<CompJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompJson {
    pub poly: String,
    pub mult: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonJson {
    pub points: Vec<[String; 2]>,
    pub vertices: Vec<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cert_bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub invariants: Option<InvariantsJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantsJson {
    pub alpha: String,
    pub beta: String,
    pub gamma: String,
    pub delta: String,
    /// None encodes ε = ∞.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eps: Option<String>,
    pub omega: [String; 3],
}

/// A descent path: consecutive nodes within one invariant regime, with the
/// per-node invariant record ("(beta, 1/eps, alpha)" for tau1-omega, "gamma"
/// for tau2-gamma, "delta" for twod-delta).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentPath {
    pub kind: String,
    pub nodes: Vec<usize>,
    pub records: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum Outcome {
    Success,
    Budget(String),
    Unsupported(String),
    ExtensionNeeded(String),
    Uncertified(String),
    Internal(String),
}

// ------------------------------------------------ converters

pub fn poly_str(p: &Poly, vars: &[&str]) -> String {
    print_poly(p, vars)
}

pub fn ord3_str(o: &Ord3) -> String {
    match o {
        Ord3::Finite(n) => format!("{}", n),
        Ord3::Above(t) => format!(">{}", t),
        Ord3::Infinite => "inf".into(),
    }
}

pub fn parse_ord3(s: &str) -> Result<Ord3> {
    if s == "inf" {
        return Ok(Ord3::Infinite);
    }
    if let Some(rest) = s.strip_prefix('>') {
        return rest
            .parse::<u32>()
            .map(Ord3::Above)
            .map_err(|_| Error::Parse(format!("bad order string: {}", s)));
    }
    s.parse::<u32>()
        .map(Ord3::Finite)
        .map_err(|_| Error::Parse(format!("bad order string: {}", s)))
}

pub fn divisors_json(d: &DivisorRecord, vars: &[&str]) -> DivisorsJson {
    DivisorsJson {
        plus: d
            .plus
            .iter()
            .map(|c| CompJson { poly: poly_str(&c.poly, vars), mult: c.mult })
            .collect(),
        minus: d
            .minus
            .iter()
            .map(|c| CompJson { poly: poly_str(&c.poly, vars), mult: c.mult })
            .collect(),
    }
}

pub fn parse_divisors(d: &DivisorsJson, vars: &[&str], field: &Field) -> Result<DivisorRecord> {
    let mut out = DivisorRecord::empty();
    for c in &d.plus {
        out.push_plus(parse_poly(&c.poly, vars, field)?, c.mult);
    }
    for c in &d.minus {
        out.push_minus(parse_poly(&c.poly, vars, field)?, c.mult);
    }
    Ok(out)
}

pub fn polygon_json(pg: &Polygon) -> PolygonJson {
    let pt = |p: &(crate::polygon::Rat, crate::polygon::Rat)| -> [String; 2] {
        [rat_str(&p.0), rat_str(&p.1)]
    };
    let invariants = pg.invariants().ok().map(|inv| InvariantsJson {
        alpha: rat_str(&inv.alpha),
        beta: rat_str(&inv.beta),
        gamma: rat_str(&inv.gamma),
        delta: rat_str(&inv.delta),
        eps: inv.eps.as_ref().map(rat_str),
        omega: [
            rat_str(&inv.omega.0),
            rat_str(&inv.omega.1),
            rat_str(&inv.omega.2),
        ],
    });
    PolygonJson {
        points: pg.points.iter().map(pt).collect(),
        vertices: pg.vertices.iter().map(pt).collect(),
        cert_bound: pg.cert_bound.as_ref().map(rat_str),
        invariants,
    }
}

pub fn coord_change_json(ch: &CoordChange, vars: &[&str]) -> Vec<String> {
    ch.images.iter().map(|p| poly_str(p, vars)).collect()
}

pub fn parse_coord_change(
    images: &[String],
    vars: &[&str],
    field: &Field,
) -> Result<CoordChange> {
    Ok(CoordChange {
        images: images
            .iter()
            .map(|s| parse_poly(s, vars, field))
            .collect::<Result<Vec<_>>>()?,
    })
}

impl Trace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialization cannot fail")
    }

    pub fn from_json(src: &str) -> Result<Trace> {
        serde_json::from_str(src).map_err(|e| Error::Parse(format!("bad trace JSON: {}", e)))
    }

    pub fn node(&self, id: usize) -> Result<&TraceNode> {
        self.nodes
            .iter()
            .find(|n| n.id == id)
            .ok_or_else(|| Error::Internal(format!("trace has no node {}", id)))
    }

    pub fn children(&self, id: usize) -> Vec<&TraceNode> {
        self.nodes.iter().filter(|n| n.parent == Some(id)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::build_delta;

    #[test]
    fn round_trip_is_byte_identical() {
        let field = Field::Q;
        let g = parse_poly("z^2 - x^3*y", &["x", "y", "z"], &field).unwrap();
        let pg = build_delta(&[g.clone()], 2).unwrap();
        let trace = Trace {
            version: TRACE_VERSION,
            job: JobMeta {
                field: FieldJson::of(&field),
                vars: vec!["x".into(), "y".into(), "z".into()],
                generators: vec![poly_str(&g, &["x", "y", "z"])],
                mode: "resolve-3d".into(),
                trunc: None,
            },
            nodes: vec![TraceNode {
                id: 0,
                parent: None,
                substitution: vec![],
                divided: None,
                preps: vec![],
                generators: vec![poly_str(&g, &["x", "y", "z"])],
                field: None,
                trunc: None,
                nu: "2".into(),
                tau: Some(1),
                divisors: DivisorsJson::default(),
                polygon: Some(polygon_json(&pg)),
                certificates: [("vwp-case".to_string(), "case1".to_string())]
                    .into_iter()
                    .collect(),
                status: "expanded".into(),
            }],
            paths: vec![DescentPath {
                kind: "tau1-omega".into(),
                nodes: vec![0],
                records: vec!["(3/2, 1, 1/2)".into()],
            }],
            outcome: Outcome::Success,
        };
        let s1 = trace.to_json();
        let back = Trace::from_json(&s1).unwrap();
        assert_eq!(back, trace);
        let s2 = back.to_json();
        assert_eq!(s1, s2);
    }

    #[test]
    fn field_json_replays() {
        let f9 = Field::Fq(crate::algebra::fq::FqField::extension(3, 2).unwrap());
        let j = FieldJson::of(&f9);
        assert_eq!(j.characteristic, 3);
        assert_eq!(j.degree, 2);
        let back = j.to_field().unwrap();
        assert_eq!(back, f9);
        let q = FieldJson::of(&Field::Q);
        assert_eq!(q.to_field().unwrap(), Field::Q);
    }

    #[test]
    fn ord3_strings() {
        assert_eq!(ord3_str(&Ord3::Finite(2)), "2");
        assert_eq!(ord3_str(&Ord3::Above(30)), ">30");
        assert_eq!(ord3_str(&Ord3::Infinite), "inf");
        assert_eq!(parse_ord3(">30").unwrap(), Ord3::Above(30));
        assert_eq!(parse_ord3("7").unwrap(), Ord3::Finite(7));
        assert_eq!(parse_ord3("inf").unwrap(), Ord3::Infinite);
    }
}
