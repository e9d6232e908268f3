//! Exact arithmetic in p-adic local cyclotomic fields and in maximal orders of
//! p-adic division algebras, together with decision procedures that classify
//! maximal finite subgroups of the Morava stabilizer groups.

pub mod arith;
pub mod classifier;
pub mod cohomology;
pub mod division_order;
pub mod error;
pub mod groups;
pub mod padic;
pub mod tower;
pub mod unit_classes;
pub mod unram;

pub use error::{Error, Result};
