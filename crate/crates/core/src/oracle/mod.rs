//! Independent semantics used to check the solver: rational tree values,
//! brute-force evaluation, model extraction and random generation.

pub mod enumerate;
pub mod eval;
pub mod model;
pub mod random;
pub mod selectors;
pub mod tree;

pub use enumerate::{default_trees, enumerate_domain, finite_trees, infinite_trees, term_value};
pub use eval::{
    eval_closed_finite, eval_outcome, eval_simplified, EvalError, Evaluator, SelectorModel,
    Valuation,
};
pub use model::{extract_model, ModelError};
pub use random::{random_formula, FormulaProfile};
pub use selectors::satisfiable_standard;
pub use tree::{rational_tree_equal, solve_equations, Node, RationalTree};
