//! Nested normal formulae `¬(∃x̄. α ∧ φ₁ ∧ … ∧ φₙ)` and the translation of
//! arbitrary formulae into them.

use std::collections::HashMap;

use thiserror::Error;

use crate::basic::{BasicFormula, Equation, Rhs};
use crate::formula::{check_sorts, Formula, FreshNames, SortError, Term, Var};
use crate::signature::Signature;

/// `¬(∃bound. alpha ∧ ⋀ children)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalFormula {
    pub bound: Vec<Var>,
    pub alpha: BasicFormula,
    pub children: Vec<NormalFormula>,
}

impl NormalFormula {
    pub fn new(bound: Vec<Var>, alpha: BasicFormula, children: Vec<NormalFormula>) -> Self {
        NormalFormula {
            bound,
            alpha,
            children,
        }
    }

    /// `¬true`, i.e. false.
    pub fn not_true() -> Self {
        NormalFormula::new(Vec::new(), BasicFormula::new(), Vec::new())
    }

    pub fn is_not_true(&self) -> bool {
        self.bound.is_empty() && self.alpha.is_empty() && self.children.is_empty()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(NormalFormula::depth)
            .max()
            .unwrap_or(0)
    }

    pub fn to_formula(&self) -> Formula {
        Formula::not(self.body_formula())
    }

    /// `∃bound. alpha ∧ ⋀ children`, without the outer negation.
    pub fn body_formula(&self) -> Formula {
        let mut parts = Vec::new();
        match self.alpha.to_formula() {
            Formula::True => {}
            Formula::And(fs) => parts.extend(fs),
            f => parts.push(f),
        }
        parts.extend(self.children.iter().map(NormalFormula::to_formula));
        let body = match parts.len() {
            0 => Formula::True,
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        };
        Formula::exists(self.bound.clone(), body)
    }

    pub fn size(&self) -> usize {
        1 + self.bound.len()
            + self.alpha.size()
            + self.children.iter().map(NormalFormula::size).sum::<usize>()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error("selector terms must be eliminated before solving")]
    Selector,
}

#[derive(Clone, Debug)]
enum Atom {
    Eq(Term, Term),
    Fin(Term),
}

#[derive(Default)]
struct Block {
    bound: Vec<Var>,
    atoms: Vec<Atom>,
    children: Vec<NormalFormula>,
}

struct Normalizer<'a> {
    sig: &'a Signature,
    fresh: &'a mut FreshNames,
    env: HashMap<Var, Var>,
}

/// Translates `f` into an equivalent normal formula. The result always has a
/// single outer negation: negated inputs are translated directly and other
/// inputs are wrapped as `¬(∃∅. ¬f)`.
pub fn normalize(
    f: &Formula,
    sig: &Signature,
    fresh: &mut FreshNames,
) -> Result<NormalFormula, NormalizeError> {
    check_sorts(f, sig)?;
    if f.has_selector() {
        return Err(NormalizeError::Selector);
    }
    let mut n = Normalizer {
        sig,
        fresh,
        env: HashMap::new(),
    };
    let mut block = Block::default();
    match f {
        Formula::Not(g) => n.block(g, &mut block),
        Formula::Forall(vs, g) => n.block(
            &Formula::Exists(vs.clone(), Box::new(Formula::not((**g).clone()))),
            &mut block,
        ),
        Formula::Or(fs) => n.block(
            &Formula::And(fs.iter().cloned().map(Formula::not).collect()),
            &mut block,
        ),
        Formula::Implies(a, b) => n.block(
            &Formula::And(vec![(**a).clone(), Formula::not((**b).clone())]),
            &mut block,
        ),
        other => {
            let inner = n.negation(other);
            block.children.push(inner);
        }
    }
    Ok(n.finish_unsorted(block))
}

impl Normalizer<'_> {
    /// Normal formula equivalent to `¬f`.
    fn negation(&mut self, f: &Formula) -> NormalFormula {
        let mut b = Block::default();
        self.block(f, &mut b);
        self.finish_unsorted(b)
    }

    fn term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => Term::Var(self.env.get(v).cloned().unwrap_or_else(|| v.clone())),
            Term::App(g, args) => Term::App(*g, args.iter().map(|a| self.term(a)).collect()),
            Term::Sel(s, inner) => Term::Sel(*s, Box::new(self.term(inner))),
        }
    }

    /// Adds to `out` the content of `∃… ∧ …` equivalent to `f`.
    fn block(&mut self, f: &Formula, out: &mut Block) {
        match f {
            Formula::True => {}
            Formula::False => out.children.push(NormalFormula::not_true()),
            Formula::Eq(a, b) => out.atoms.push(Atom::Eq(self.term(a), self.term(b))),
            Formula::Fin(t) => out.atoms.push(Atom::Fin(self.term(t))),
            Formula::And(fs) => fs.iter().for_each(|g| self.block(g, out)),
            Formula::Exists(vs, g) => {
                let saved: Vec<(Var, Option<Var>)> = vs
                    .iter()
                    .map(|v| {
                        let nv = self.fresh.var(v.sort());
                        out.bound.push(nv.clone());
                        (v.clone(), self.env.insert(v.clone(), nv))
                    })
                    .collect();
                self.block(g, out);
                for (v, old) in saved.into_iter().rev() {
                    match old {
                        Some(o) => self.env.insert(v, o),
                        None => self.env.remove(&v),
                    };
                }
            }
            Formula::Or(fs) => {
                let conj = Formula::And(fs.iter().cloned().map(Formula::not).collect());
                let child = self.negation(&conj);
                out.children.push(child);
            }
            Formula::Implies(a, b) => {
                let conj = Formula::And(vec![(**a).clone(), Formula::not((**b).clone())]);
                let child = self.negation(&conj);
                out.children.push(child);
            }
            Formula::Iff(a, b) => {
                let (a, b) = ((**a).clone(), (**b).clone());
                self.block(&Formula::implies(a.clone(), b.clone()), out);
                self.block(&Formula::implies(b, a), out);
            }
            Formula::Forall(vs, g) => {
                let ex = Formula::Exists(vs.clone(), Box::new(Formula::not((**g).clone())));
                let child = self.negation(&ex);
                out.children.push(child);
            }
            Formula::Not(g) => match &**g {
                Formula::Not(h) => self.block(h, out),
                Formula::True => out.children.push(NormalFormula::not_true()),
                Formula::False => {}
                Formula::Or(fs) => self.block(
                    &Formula::And(fs.iter().cloned().map(Formula::not).collect()),
                    out,
                ),
                Formula::Implies(a, b) => self.block(
                    &Formula::And(vec![(**a).clone(), Formula::not((**b).clone())]),
                    out,
                ),
                Formula::Forall(vs, h) => self.block(
                    &Formula::Exists(vs.clone(), Box::new(Formula::not((**h).clone()))),
                    out,
                ),
                other => {
                    let child = self.negation(other);
                    out.children.push(child);
                }
            },
        }
    }

    fn finish_unsorted(&mut self, b: Block) -> NormalFormula {
        let mut flat = Flattener {
            sig: self.sig,
            fresh: self.fresh,
            bound: b.bound,
            alpha: BasicFormula::new(),
        };
        for atom in b.atoms {
            match atom {
                Atom::Eq(l, r) => flat.equation(&l, &r),
                Atom::Fin(t) => {
                    let v = flat.name(&t);
                    flat.alpha.fins.push(v);
                }
            }
        }
        NormalFormula {
            bound: flat.bound,
            alpha: flat.alpha,
            children: b.children,
        }
    }
}

/// Flattens atoms into a basic formula, naming nested subterms with fresh
/// variables that are appended to `bound`.
pub struct Flattener<'a> {
    pub sig: &'a Signature,
    pub fresh: &'a mut FreshNames,
    pub bound: Vec<Var>,
    pub alpha: BasicFormula,
}

impl Flattener<'_> {
    /// Variable standing for `t`, adding its defining equations.
    pub fn name(&mut self, t: &Term) -> Var {
        match t {
            Term::Var(v) => v.clone(),
            _ => {
                let v = self.fresh.var(t.sort(self.sig));
                self.bound.push(v.clone());
                self.define(&v, t);
                v
            }
        }
    }

    pub fn define(&mut self, v: &Var, t: &Term) {
        match t {
            Term::Var(u) => self.alpha.eqs.push(Equation::var(v.clone(), u.clone())),
            Term::App(g, args) => {
                let vs = args.iter().map(|a| self.name(a)).collect();
                self.alpha.eqs.push(Equation {
                    lhs: v.clone(),
                    rhs: Rhs::App(*g, vs),
                });
            }
            Term::Sel(..) => unreachable!("selectors rejected before flattening"),
        }
    }

    pub fn equation(&mut self, l: &Term, r: &Term) {
        match (l, r) {
            (Term::Var(x), t) | (t, Term::Var(x)) => self.define(x, t),
            (t1, _) => {
                let v = self.name(t1);
                self.define(&v, r);
            }
        }
    }
}

/// Flat form of `l = r`: fresh variables and the equations defining them.
pub fn flatten_to_basic(
    l: &Term,
    r: &Term,
    sig: &Signature,
    fresh: &mut FreshNames,
) -> (Vec<Var>, BasicFormula) {
    let mut flat = Flattener {
        sig,
        fresh,
        bound: Vec::new(),
        alpha: BasicFormula::new(),
    };
    flat.equation(l, r);
    (flat.bound, flat.alpha)
}
