//! Coefficient arithmetic and multivariate polynomials.

pub mod fq;
pub mod coeff;
pub mod unipoly;
pub mod linalg;
pub mod binom;
pub mod poly;
pub mod parse;

pub use coeff::{Field, K};
pub use fq::{FqElem, FqField};
pub use poly::{Mono, Ord3, Poly};
