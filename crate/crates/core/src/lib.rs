//! Finite algebras, congruence identities and Maltsev term chains.

pub mod algebra;
pub mod condition;
pub mod constructions;
pub mod error;
pub mod free;
pub mod io;
pub mod level;
pub mod relation;
pub mod relexpr;
pub mod reproduce;
pub mod search;
pub mod term;
pub mod transform;

pub use error::{Error, Result};
