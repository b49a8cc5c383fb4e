//! Exact-arithmetic engine for resolving singularities of surfaces (and more
//! general ideals) embedded in nonsingular 3-fold charts, over Q or any
//! finite field, with no restriction on the characteristic.
//!
//! The library is organised bottom-up:
//!
//! * [`algebra`] — coefficient fields, multivariate polynomials with
//!   truncation tracking, Hasse derivatives, substitution.
//! * [`groebner`] — a small Buchberger implementation used for ideal
//!   membership, elimination and dimension questions in ≤ 4 variables.
//! * [`singular`] — order ν, the singular locus of order ≥ r, the directrix
//!   invariant τ, good parameters, coefficient ideals.
//! * [`polygon`] — the Newton polygon of an ideal with respect to chosen
//!   parameters, its numerical invariants (α, β, γ, δ, ε, Ω) and the σ-maps
//!   describing how it transforms under monoidal maps.
//! * [`prepare`] — vertex solvability, well and very-well preparation.
//! * [`blowup`] — charts, permissibility, weak transforms, divisor records.
//! * [`resolver`] — the actual resolution drivers (2-d and 3-d), the
//!   independent certificate verifier, and the final smoothness / normal
//!   crossings checks.
//! * [`trace`] — a canonical JSON trace of everything the engine did.

pub mod algebra;
pub mod groebner;
pub mod singular;
pub mod polygon;
pub mod prepare;
pub mod blowup;
pub mod resolver;
pub mod trace;

use serde::{Deserialize, Serialize};

/// Engine-wide error type. Every fallible public operation returns this.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    /// A computation needed more of a power series than the truncation bound
    /// retained (e.g. translating a jet by a constant).
    #[error("insufficient precision: {0}")]
    Truncation(String),
    /// A configured budget (depth, preparation steps, …) was exhausted.
    #[error("budget exhausted: {0}")]
    Budget(String),
    /// Input falls outside the supported fragment (non-perfect ground data,
    /// number-field extensions over Q, …).
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// A closed point with no rational witness was found; resolving further
    /// requires extending the coefficient field.
    #[error("field extension required: {0}")]
    ExtensionNeeded(String),
    /// An internal invariant of the algorithm failed; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
    /// An invariant was read from a region of the Newton polygon that the
    /// current truncation cannot certify.
    #[error("uncertified region: {0}")]
    Uncertified(String),
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Resource bounds for the drivers. Resolution in positive characteristic
/// has no a-priori global bound usable in a chart-by-chart engine, so every
/// loop that is only known to terminate abstractly is budgeted.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Budgets {
    /// Truncation degree for jets introduced by the driver (`None` = exact).
    pub trunc: Option<u32>,
    /// Maximum blow-up depth along any chart path.
    pub max_depth: u32,
    /// Maximum preparation (translation) steps at a single node.
    pub max_prep: u32,
    /// Maximum total degree allowed in any substitution image; guards
    /// against coefficient blow-up over Q.
    pub max_subst_degree: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { trunc: Some(30), max_depth: 64, max_prep: 64, max_subst_degree: 4096 }
    }
}

impl Budgets {
    pub fn exact() -> Self {
        Budgets { trunc: None, ..Budgets::default() }
    }
}

/// Data-parallel shim. With the `parallel` feature the corpus runner, the
/// finite-field point scans and the certificate verifier fan out through
/// rayon; without it (or with [`par::set_sequential`]) the same call sites
/// run sequentially, so both modes share one code path and one test suite.
pub mod par {
    use std::sync::atomic::{AtomicBool, Ordering};

    static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

    /// Runtime override: route `map_collect` through the sequential path
    /// even when compiled with the `parallel` feature. Used by the benches
    /// to compare both modes inside one binary.
    pub fn set_sequential(on: bool) {
        FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
    }

    pub fn is_parallel() -> bool {
        cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::SeqCst)
    }

    /// Apply `f` to every item, preserving order of results.
    pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
    where
        T: Send,
        U: Send,
        F: Fn(T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            if is_parallel() {
                use rayon::prelude::*;
                return items.into_par_iter().map(f).collect();
            }
        }
        items.into_iter().map(f).collect()
    }

    /// `true` if any item satisfies the predicate.
    pub fn any<T, F>(items: Vec<T>, f: F) -> bool
    where
        T: Send,
        F: Fn(T) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            if is_parallel() {
                use rayon::prelude::*;
                return items.into_par_iter().any(f);
            }
        }
        items.into_iter().any(f)
    }
}
