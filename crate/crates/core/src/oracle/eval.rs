//! Direct evaluation of formulae on rational trees.

use std::collections::HashMap;

use thiserror::Error;

use crate::analysis::SortAnalysis;
use crate::basic::{BasicFormula, Rhs};
use crate::formula::{Formula, Selector, Term, Var};
use crate::signature::{Signature, SortId};
use crate::solver::{SimplifiedFormula, SolveOutcome};

use super::enumerate::enumerate_domain;
use super::tree::{solve_equations, RationalTree};

pub type Valuation = HashMap<Var, RationalTree>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("sort {0} has infinitely many trees")]
    InfiniteDomain(String),
    #[error("no value for variable {0}")]
    Unbound(String),
    #[error("no interpretation for selector {0}")]
    Selector(String),
    #[error("value of bound variable {0} is not determined by the free variables")]
    Undetermined(String),
}

/// Interpretation of selector symbols.
pub trait SelectorModel {
    fn apply(&self, sel: Selector, arg: &RationalTree) -> Option<RationalTree>;
}

/// Evaluates formulae under a valuation, with quantifiers ranging over
/// enumerated domains. A domain may be overridden per sort, in which case
/// quantifiers over that sort only range over the given trees.
pub struct Evaluator<'a> {
    sig: &'a Signature,
    analysis: &'a SortAnalysis,
    domains: HashMap<SortId, Vec<RationalTree>>,
    selectors: Option<&'a dyn SelectorModel>,
}

impl<'a> Evaluator<'a> {
    pub fn new(sig: &'a Signature, analysis: &'a SortAnalysis) -> Self {
        Evaluator {
            sig,
            analysis,
            domains: HashMap::new(),
            selectors: None,
        }
    }

    pub fn with_domain(mut self, s: SortId, values: Vec<RationalTree>) -> Self {
        self.domains.insert(s, values);
        self
    }

    pub fn with_selectors(mut self, m: &'a dyn SelectorModel) -> Self {
        self.selectors = Some(m);
        self
    }

    pub fn domain(&mut self, s: SortId) -> Result<&[RationalTree], EvalError> {
        if !self.domains.contains_key(&s) {
            let d = enumerate_domain(s, self.sig, self.analysis)?;
            self.domains.insert(s, d);
        }
        Ok(&self.domains[&s])
    }

    pub fn term(&self, t: &Term, val: &Valuation) -> Result<RationalTree, EvalError> {
        match t {
            Term::Var(v) => val
                .get(v)
                .cloned()
                .ok_or_else(|| EvalError::Unbound(v.name().to_string())),
            Term::App(g, args) => {
                let args = args
                    .iter()
                    .map(|a| self.term(a, val))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(RationalTree::apply(*g, &args))
            }
            Term::Sel(s, inner) => {
                let arg = self.term(inner, val)?;
                let name = || crate::formula::selector_display_name(*s, self.sig);
                let model = self.selectors.ok_or_else(|| EvalError::Selector(name()))?;
                model
                    .apply(*s, &arg)
                    .ok_or_else(|| EvalError::Selector(name()))
            }
        }
    }

    pub fn eval(&mut self, f: &Formula, val: &mut Valuation) -> Result<bool, EvalError> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Eq(a, b) => self.term(a, val)? == self.term(b, val)?,
            Formula::Fin(t) => self.term(t, val)?.is_finite(),
            Formula::Not(g) => !self.eval(g, val)?,
            Formula::And(fs) => {
                for g in fs {
                    if !self.eval(g, val)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for g in fs {
                    if self.eval(g, val)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !self.eval(a, val)? || self.eval(b, val)?,
            Formula::Iff(a, b) => self.eval(a, val)? == self.eval(b, val)?,
            Formula::Exists(vs, g) => self.quantify(vs, g, val, true)?,
            Formula::Forall(vs, g) => self.quantify(vs, g, val, false)?,
        })
    }

    /// `∃vs. g` if `exists`, otherwise `∀vs. g`.
    fn quantify(
        &mut self,
        vs: &[Var],
        g: &Formula,
        val: &mut Valuation,
        exists: bool,
    ) -> Result<bool, EvalError> {
        let Some((v, rest)) = vs.split_first() else {
            return self.eval(g, val);
        };
        let dom = self.domain(v.sort())?.to_vec();
        let saved = val.remove(v);
        let mut result = !exists;
        for t in dom {
            val.insert(v.clone(), t);
            if self.quantify(rest, g, val, exists)? == exists {
                result = exists;
                break;
            }
        }
        match saved {
            Some(t) => val.insert(v.clone(), t),
            None => val.remove(v),
        };
        Ok(result)
    }
}

/// Truth value of a closed formula whose quantified sorts all have finite domains.
pub fn eval_closed_finite(
    f: &Formula,
    sig: &Signature,
    analysis: &SortAnalysis,
) -> Result<bool, EvalError> {
    Evaluator::new(sig, analysis).eval(f, &mut Valuation::new())
}

/// Extends `known` by reading off the values of variables below known ones
/// in generator equations. Returns `None` on a mismatch.
fn match_down(b: &BasicFormula, known: &mut Valuation) -> Option<()> {
    let mut done = vec![false; b.eqs.len()];
    loop {
        let mut progress = false;
        for (i, e) in b.eqs.iter().enumerate() {
            if done[i] {
                continue;
            }
            let Some(val) = known.get(&e.lhs).cloned() else {
                continue;
            };
            done[i] = true;
            progress = true;
            let parts: Vec<(Var, RationalTree)> = match &e.rhs {
                Rhs::Var(w) => vec![(w.clone(), val)],
                Rhs::App(g, ws) => {
                    if val.root_gen() != *g || val.arity() != ws.len() {
                        return None;
                    }
                    ws.iter()
                        .enumerate()
                        .map(|(k, w)| (w.clone(), val.child(k)))
                        .collect()
                }
            };
            for (w, t) in parts {
                match known.get(&w) {
                    Some(old) if *old != t => return None,
                    Some(_) => {}
                    None => {
                        known.insert(w, t);
                    }
                }
            }
        }
        if !progress {
            return Some(());
        }
    }
}

/// Whether `∃bound. b` holds when every other variable of `b` is in `known`
/// and `b` is a solved basic formula.
pub fn holds_solved(b: &BasicFormula, known: &Valuation, bound: &[Var]) -> Result<bool, EvalError> {
    for v in b.vars() {
        if !known.contains_key(&v) && !bound.contains(&v) {
            return Err(EvalError::Unbound(v.name().to_string()));
        }
    }
    let mut k = known.clone();
    if match_down(b, &mut k).is_none() {
        return Ok(false);
    }
    // Variables still unknown are bound; solved form lets them take values
    // satisfying the remaining atoms.
    Ok(b.fins
        .iter()
        .all(|v| k.get(v).is_none_or(RationalTree::is_finite)))
}

/// Truth value of a fully simplified disjunct under a valuation of its free
/// variables, by reading the bound variables off the free ones.
pub fn eval_simplified(d: &SimplifiedFormula, val: &Valuation) -> Result<bool, EvalError> {
    let mut known: Valuation = Valuation::new();
    for v in &d.free {
        if let Some(t) = val.get(v) {
            known.insert(v.clone(), t.clone());
        }
    }
    for v in d.alpha().vars() {
        if !known.contains_key(&v) && !d.bound().contains(&v) {
            return Err(EvalError::Unbound(v.name().to_string()));
        }
    }
    if match_down(d.alpha(), &mut known).is_none() {
        return Ok(false);
    }
    if d.alpha().vars().iter().any(|v| !known.contains_key(v)) {
        // Bound variables defined over other bound ones.
        match solve_equations(d.alpha(), &known) {
            Some(all) => known = all,
            None => {
                let v = d
                    .alpha()
                    .vars()
                    .into_iter()
                    .find(|v| !known.contains_key(v))
                    .unwrap();
                return Err(EvalError::Undetermined(v.name().to_string()));
            }
        }
        let mut check = known.clone();
        if match_down(d.alpha(), &mut check).is_none() {
            return Ok(false);
        }
    }
    if !d.alpha().fins.iter().all(|v| known[v].is_finite()) {
        return Ok(false);
    }
    for c in &d.normal.children {
        if let Some(v) =
            c.alpha.vars().iter().find(|v| {
                !known.contains_key(*v) && !c.bound.contains(*v) && d.bound().contains(*v)
            })
        {
            return Err(EvalError::Undetermined(v.name().to_string()));
        }
        if holds_solved(&c.alpha, &known, &c.bound)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Truth value of a solver result under a valuation.
pub fn eval_outcome(out: &SolveOutcome, val: &Valuation) -> Result<bool, EvalError> {
    match out {
        SolveOutcome::True => Ok(true),
        SolveOutcome::False => Ok(false),
        SolveOutcome::Disjunction(ds) => {
            for d in ds {
                if eval_simplified(d, val)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}
