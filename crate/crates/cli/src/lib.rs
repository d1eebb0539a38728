//! Problem files, reports and the benchmark harness for the tree-theory
//! solver.

pub mod bench;
pub mod corpus;
pub mod problem;
pub mod run;
pub mod sexpr;

pub use bench::{bench, BenchSummary, Bucket};
pub use problem::{parse_formula, parse_problem, Command, Context, Problem, ProblemError};
pub use run::{render, run, OutputFormat, Report, RunError, RunOptions, Semantics, Status};
