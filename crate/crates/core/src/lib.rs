//! Exact invariant theory of the finite matrix groups attached to Type II
//! codes over `Z4`: E-polynomials, complete weight enumerators, and graded
//! dimensions of the rings they generate.

pub mod cache;
pub mod codes;
pub mod cyclotomic;
pub mod epoly;
pub mod error;
pub mod groups;
pub mod invariants;
pub mod matgroup;
pub mod poly;
pub mod rank;
pub mod series;
pub mod span;
pub mod substitute;
pub mod tables;

pub use error::{Error, Result};
