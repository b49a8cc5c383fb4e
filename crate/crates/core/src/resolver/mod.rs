//! Chart-by-chart resolution drivers.
//!
//! A resolution run is a tree of affine charts. Every node owns its origin
//! and — after a blow-up — the points of its own exceptional fibre; points
//! away from those are the responsibility of sibling subtrees, so no chart
//! region is processed twice. The drivers below walk that tree breadth
//! first, recording every substitution, preparation step and certificate
//! into a replayable trace.

pub mod preprocess;
pub mod threed;
pub mod twod;

use crate::algebra::{Field, K, Ord3, Poly};
use crate::blowup::DivisorRecord;
use crate::trace::Outcome;
use crate::{Budgets, Error, Result};

/// Knobs for a resolution run.
#[derive(Debug, Clone)]
pub struct ResolveOptions {
    pub budgets: Budgets,
    /// Allow replacing F_q by an extension when a survivor or parameter
    /// lives outside the base field. Over Q the run stops honestly instead.
    pub allow_extension: bool,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { budgets: Budgets::default(), allow_extension: false }
    }
}

impl ResolveOptions {
    /// Exact arithmetic, no truncation: for small inputs and for tests.
    pub fn exact() -> Self {
        ResolveOptions { budgets: Budgets::exact(), allow_extension: false }
    }
}

/// Fold a hard error into the trace outcome so a run always produces a
/// readable artifact.
pub(crate) fn outcome_of_error(e: &Error) -> Outcome {
    match e {
        Error::Truncation(d) => Outcome::Budget(format!("truncation: {d}")),
        Error::Budget(d) => Outcome::Budget(d.clone()),
        Error::Unsupported(d) => Outcome::Unsupported(d.clone()),
        Error::ExtensionNeeded(d) => Outcome::ExtensionNeeded(d.clone()),
        Error::Uncertified(d) => Outcome::Uncertified(d.clone()),
        Error::Parse(d) | Error::Internal(d) | Error::Arithmetic(d) => Outcome::Internal(d.clone()),
    }
}

/// Order of the ideal at the chart origin: minimum of the generator orders.
/// Refuses to answer when truncation can hide the minimum.
pub(crate) fn ideal_order(gens: &[Poly]) -> Result<u32> {
    let mut fin: Option<u32> = None;
    let mut above: Option<u32> = None;
    for g in gens {
        match g.order() {
            Ord3::Finite(o) => fin = Some(fin.map_or(o, |b| b.min(o))),
            Ord3::Above(t) => above = Some(above.map_or(t, |b: u32| b.min(t))),
            Ord3::Infinite => {}
        }
    }
    match (fin, above) {
        (Some(o), Some(t)) if o > t => Err(Error::Truncation(
            "a truncated generator may hide the minimal order".into(),
        )),
        (Some(o), _) => Ok(o),
        (None, Some(_)) => Err(Error::Truncation(
            "every generator is truncated below its order".into(),
        )),
        (None, None) => Err(Error::Internal("the zero ideal has no order".into())),
    }
}

/// Coefficient embedding along a finite-field extension.
pub(crate) fn embed_k(big: &Field, k: &K) -> Result<K> {
    match (big, k) {
        (Field::Fq(fq), K::F(e)) => Ok(K::F(fq.embed(e)?)),
        _ => Err(Error::Internal("embedding is only defined between finite fields".into())),
    }
}

pub(crate) fn embed_poly(g: &Poly, big: &Field) -> Result<Poly> {
    g.map_field(big, |k| embed_k(big, k))
}

pub(crate) fn embed_gens(gens: &[Poly], big: &Field) -> Result<Vec<Poly>> {
    gens.iter().map(|g| embed_poly(g, big)).collect()
}

pub(crate) fn embed_divisors(div: &DivisorRecord, big: &Field) -> Result<DivisorRecord> {
    let mut out = DivisorRecord::default();
    for c in &div.plus {
        out.plus.push(crate::blowup::DivComp { poly: embed_poly(&c.poly, big)?, mult: c.mult });
    }
    for c in &div.minus {
        out.minus.push(crate::blowup::DivComp { poly: embed_poly(&c.poly, big)?, mult: c.mult });
    }
    Ok(out)
}

/// A base extension rewrites the chart in the bigger field, but the node's
/// substitution strings were printed at creation time over the smaller one;
/// re-embed them so that everything stated on a node parses over that node's
/// final field.
pub(crate) fn rebase_substitution(
    n: &mut crate::trace::TraceNode,
    old: &Field,
    big: &Field,
    vars: &[&str],
) -> Result<()> {
    if n.substitution.is_empty() {
        return Ok(());
    }
    let mut out = Vec::with_capacity(n.substitution.len());
    for s in &n.substitution {
        let g = crate::algebra::parse::parse_poly(s, vars, old)?;
        out.push(crate::trace::poly_str(&embed_poly(&g, big)?, vars));
    }
    n.substitution = out;
    Ok(())
}
