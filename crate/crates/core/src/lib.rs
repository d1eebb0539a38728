//! Decision and simplification procedure for the first-order theory of
//! finite and infinite trees extended with a finiteness predicate, with
//! frontends for datatypes and codatatypes.

pub mod analysis;
pub mod basic;
pub mod budget;
pub mod datatypes;
pub mod formula;
pub mod instantiate;
pub mod normal;
pub mod oracle;
pub mod signature;
pub mod solver;

pub use analysis::{compute_finite_sets, compute_zero_sets, SortAnalysis};
pub use basic::{solve_basic, BasicFormula, Equation, Rhs};
pub use formula::{canonicalize, free_variables, Formula, FreshNames, Term, Var};
pub use normal::{normalize, NormalFormula};
pub use signature::{example_signature, validate_signature, GenId, Signature, SortId};
pub use solver::{solve, SimplifiedFormula, SolveOutcome, Solver, SolverConfig};
