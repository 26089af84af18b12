//! Inhabitation of rank-2 intersection types, alternating linear bounded
//! automata, and the reduction from the latter to the former.

pub mod alba;
pub mod harness;
pub mod reduction;
pub mod solver;
pub mod term;
pub mod types;

pub use solver::{solve, Limits, SolveResult};
pub use term::{Derivation, Term};
pub use types::{parse_type, TypeExpr};
