//! Exact computational engine for rank-three hyperbolic Coxeter groups and
//! the dual Garside structures of the associated Artin groups.
//!
//! The engine works throughout in the geometric representation over the real
//! cyclotomic field Q(2cos(pi/L)), so every predicate (signs, membership,
//! lattice order) is decided exactly. On top of the group model it provides:
//!
//! - the noncrossing partition interval `[1,w]` with meets, joins, and
//!   axially increasing factorizations;
//! - greedy (left-weighted) Garside normal forms solving the Artin group
//!   word problem;
//! - finite windows of the interval complex: fiber components, subcomplex
//!   membership flags, and the discrete Morse matchings on them;
//! - deterministic SVG rendering of the reflection arrangement.

pub mod config;
pub mod coxeter;
pub mod error;
pub mod field;
pub mod garside;
pub mod geometry;
pub mod lattice;
pub mod linalg;
pub mod morse;
pub mod render;
pub mod verify;

pub use config::InstanceConfig;
pub use error::{CoxError, Result};
pub use field::{FieldElement, FieldSpec, Sign};
