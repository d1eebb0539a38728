//! Satisfiability under standard selector semantics, where a selector
//! applied to the wrong constructor may return any value of its sort.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use crate::analysis::SortAnalysis;
use crate::formula::{Formula, Selector, Var};
use crate::signature::{Signature, SortId};

use super::enumerate::enumerate_domain;
use super::eval::{EvalError, Evaluator, SelectorModel, Valuation};
use super::tree::RationalTree;

/// A partial interpretation of the selectors on wrong constructors. Asking
/// for an unassigned point records it and fails the evaluation.
#[derive(Default)]
struct Partial {
    assigned: RefCell<BTreeMap<(Selector, RationalTree), RationalTree>>,
    missing: RefCell<Option<(Selector, RationalTree)>>,
}

impl SelectorModel for Partial {
    fn apply(&self, sel: Selector, arg: &RationalTree) -> Option<RationalTree> {
        if arg.root_gen() == sel.ctor {
            return Some(arg.child(sel.index));
        }
        let key = (sel, arg.clone());
        let found = self.assigned.borrow().get(&key).cloned();
        if found.is_none() {
            *self.missing.borrow_mut() = Some(key);
        }
        found
    }
}

struct Search<'a> {
    sig: &'a Signature,
    analysis: &'a SortAnalysis,
    domains: HashMap<SortId, Vec<RationalTree>>,
}

impl Search<'_> {
    fn domain(&mut self, s: SortId) -> Result<Vec<RationalTree>, EvalError> {
        if !self.domains.contains_key(&s) {
            let d = enumerate_domain(s, self.sig, self.analysis)?;
            self.domains.insert(s, d);
        }
        Ok(self.domains[&s].clone())
    }

    /// Whether some extension of `partial` makes `f` true under `val`.
    fn extend(
        &mut self,
        f: &Formula,
        val: &Valuation,
        partial: &Partial,
    ) -> Result<bool, EvalError> {
        *partial.missing.borrow_mut() = None;
        let result = Evaluator::new(self.sig, self.analysis)
            .with_selectors(partial)
            .eval(f, &mut val.clone());
        match result {
            Ok(b) => Ok(b),
            Err(EvalError::Selector(_)) => {
                let Some((sel, arg)) = partial.missing.borrow_mut().take() else {
                    return result;
                };
                let result_sort = self.sig.generator(sel.ctor).args[sel.index];
                for v in self.domain(result_sort)? {
                    partial.assigned.borrow_mut().insert((sel, arg.clone()), v);
                    if self.extend(f, val, partial)? {
                        return Ok(true);
                    }
                }
                partial.assigned.borrow_mut().remove(&(sel, arg));
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }
}

/// Whether some valuation of `free` and some interpretation of the selectors
/// on wrong constructors make `f` true. Every sort involved must have a
/// finite domain.
pub fn satisfiable_standard(
    f: &Formula,
    free: &[Var],
    sig: &Signature,
    analysis: &SortAnalysis,
) -> Result<bool, EvalError> {
    let mut search = Search {
        sig,
        analysis,
        domains: HashMap::new(),
    };
    let mut vals = vec![Valuation::new()];
    for v in free {
        let dom = search.domain(v.sort())?;
        vals = vals
            .into_iter()
            .flat_map(|val| {
                dom.iter().map(move |t| {
                    let mut w = val.clone();
                    w.insert(v.clone(), t.clone());
                    w
                })
            })
            .collect();
    }
    for val in vals {
        if search.extend(f, &val, &Partial::default())? {
            return Ok(true);
        }
    }
    Ok(false)
}
