//! Satisfying valuations for fully simplified formulae.

use std::collections::HashMap;

use thiserror::Error;

use crate::analysis::SortAnalysis;
use crate::formula::Var;
use crate::signature::{Signature, SortId};
use crate::solver::{check_solved, SimplifiedFormula, Violation};

use super::enumerate::{enumerate_domain, finite_trees, infinite_trees};
use super::eval::{eval_simplified, Valuation};
use super::tree::{solve_equations, RationalTree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("formula is not fully simplified: {0}")]
    NotSimplified(#[from] Violation),
    #[error("no model found among the candidate values")]
    NotFound,
}

/// Candidate values per sort, in the order they are tried.
struct Pools {
    finite: HashMap<SortId, Vec<RationalTree>>,
    infinite: HashMap<SortId, Vec<RationalTree>>,
}

impl Pools {
    fn new(sig: &Signature, analysis: &SortAnalysis, size: usize) -> Self {
        let mut finite: HashMap<SortId, Vec<RationalTree>> =
            finite_trees(sig, size).into_iter().collect();
        let mut infinite: HashMap<SortId, Vec<RationalTree>> =
            infinite_trees(sig, analysis, size).into_iter().collect();
        for s in sig.sorts() {
            if let Ok(dom) = enumerate_domain(s, sig, analysis) {
                let (f, i): (Vec<_>, Vec<_>) = dom.into_iter().partition(RationalTree::is_finite);
                finite.insert(s, f);
                infinite.insert(s, i);
            }
        }
        Pools { finite, infinite }
    }

    /// Finite values first: they are the ones that fresh choices need
    /// most often, and a `fin` atom restricts to them.
    fn for_var(&self, s: SortId, must_be_finite: bool) -> Vec<RationalTree> {
        let mut out = self.finite[&s].clone();
        if !must_be_finite {
            out.extend(self.infinite[&s].iter().cloned());
        }
        out
    }
}

/// A valuation of the free variables that satisfies `d`.
///
/// Variables not defined by the outer equations are chosen from growing
/// pools of small finite and rational trees, the defined ones are then read
/// off the equations, and each candidate is checked against the nested
/// negated formulae.
pub fn extract_model(
    d: &SimplifiedFormula,
    sig: &Signature,
    analysis: &SortAnalysis,
) -> Result<Valuation, ModelError> {
    // The search only relies on the structure of the outer formula, so a
    // leftover instantiable variable is tolerated.
    match check_solved(&d.free, &d.normal, analysis) {
        Err(v) if v.condition != 4 => return Err(v.into()),
        _ => {}
    }
    let alpha = d.alpha();
    let choice: Vec<Var> = d
        .free
        .iter()
        .chain(d.bound())
        .filter(|v| !alpha.is_lhs(v))
        .cloned()
        .collect();
    for size in [2usize, 4, 8, 16] {
        let pools = Pools::new(sig, analysis, size);
        let options: Vec<Vec<RationalTree>> = choice
            .iter()
            .map(|v| pools.for_var(v.sort(), alpha.fins.contains(v)))
            .collect();
        if options.iter().any(Vec::is_empty) {
            return Err(ModelError::NotFound);
        }
        let mut idx = vec![0usize; choice.len()];
        let mut tried = 0usize;
        loop {
            tried += 1;
            let known: Valuation = choice
                .iter()
                .cloned()
                .zip(idx.iter().zip(&options).map(|(i, o)| o[*i].clone()))
                .collect();
            if let Some(all) = solve_equations(alpha, &known) {
                let free: Valuation = d
                    .free
                    .iter()
                    .map(|v| {
                        (
                            v.clone(),
                            all.get(v).cloned().unwrap_or_else(|| known[v].clone()),
                        )
                    })
                    .collect();
                if eval_simplified(d, &free) == Ok(true) {
                    return Ok(free);
                }
            }
            if tried > 200_000 || !advance(&mut idx, &options) {
                break;
            }
        }
    }
    Err(ModelError::NotFound)
}

fn advance(idx: &mut [usize], options: &[Vec<RationalTree>]) -> bool {
    for k in 0..idx.len() {
        idx[k] += 1;
        if idx[k] < options[k].len() {
            return true;
        }
        idx[k] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basic::{BasicFormula, Equation};
    use crate::normal::NormalFormula;
    use crate::signature::example_signature;

    #[test]
    fn succ_rooted_example() {
        // ∃v. x = succ(v) ∧ v = y ∧ fin(y) ∧ ¬(∃w. y = succ(w) ∧ fin(w) ∧ fin(z))
        let sig = example_signature();
        let an = SortAnalysis::compute(&sig).unwrap();
        let nat = sig.sort("nat").unwrap();
        let succ = sig.generator_by_name("succ").unwrap();
        let v = |n: &str| Var::new(n, nat);
        let (x, y, z, b, w) = (v("x"), v("y"), v("z"), v("v"), v("w"));
        let alpha = BasicFormula {
            eqs: vec![
                Equation::app(x.clone(), succ, vec![b.clone()]),
                Equation::var(b.clone(), y.clone()),
            ],
            fins: vec![y.clone()],
        };
        let mut beta = alpha.clone();
        beta.fins.clear();
        beta.eqs
            .push(Equation::app(y.clone(), succ, vec![w.clone()]));
        beta.fins.extend([w.clone(), z.clone()]);
        let d = SimplifiedFormula {
            free: vec![x.clone(), y.clone(), z.clone()],
            normal: NormalFormula::new(
                vec![b],
                alpha,
                vec![NormalFormula::new(vec![w], beta, vec![])],
            ),
        };
        let m = extract_model(&d, &sig, &an).unwrap();
        assert!(m[&y].is_finite());
        assert_ne!(m[&y].root_gen(), succ);
        assert_eq!(m[&x], RationalTree::apply(succ, &[m[&y].clone()]));
        assert_eq!(eval_simplified(&d, &m), Ok(true));
    }
}
