//! Inductive MacLane valuations on Q[x] over the p-adic valuation: Newton
//! polygons of phi-expansions, residue-field towers, recursive residual
//! polynomials and an OM factorization driver.

#![allow(clippy::needless_range_loop)]

pub mod base_field;
pub mod error;
pub mod maclane_chain;
pub mod newton_polygon;
pub mod om_factorizer;
pub mod ordered_groups;
pub mod residual;
pub mod residue_tower;
pub mod selftest;

pub use error::{Error, Result};

/// Exact rational numbers.
pub type Rat = num_rational::BigRational;
