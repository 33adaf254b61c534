pub mod acceptance;
pub mod bar_diff;
pub mod coeff;
pub mod cli;
pub mod criticality;
pub mod error;
pub mod exact_homology;
pub mod f2linalg;
pub mod faces;
pub mod fixtures;
pub mod free_lie;
pub mod free_operad;
pub mod level_trees;
pub mod perm;

pub use coeff::{Coeff, Ring, F2};
pub use error::{Error, Result};
pub use free_operad::{FormalSum, LinComb, OperadTerm};
pub use level_trees::{Barcode, FlagOfPreorders, Gap, Label, LabeledLevelTree, LevelTree};
pub use perm::Perm;

/// Formal sums with integer coefficients.
pub type ZSum = FormalSum<i64>;
/// Formal sums modulo 2.
pub type F2Sum = FormalSum<F2>;
