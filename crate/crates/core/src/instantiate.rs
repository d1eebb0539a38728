//! Case splits on a single variable that make progress towards solved form.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::analysis::SortAnalysis;
use crate::basic::{BasicFormula, Conjunct, Equation, Rhs};
use crate::formula::{FreshNames, Term, Var};
use crate::normal::{Flattener, NormalFormula};
use crate::signature::Signature;

/// Which of the four instantiation conditions selected the variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Condition {
    /// A nested formula fixes the top generator of the variable.
    Generator = 1,
    /// The sort has finitely many finite and infinite trees and the outer
    /// formula does not define the variable.
    FiniteDomain = 2,
    /// The variable is finite and its sort has finitely many finite trees.
    FiniteTrees = 3,
    /// A nested formula of `fin` atoms only constrains the variable and its
    /// sort has finitely many infinite trees.
    InfiniteTrees = 4,
}

impl Condition {
    pub fn number(self) -> u8 {
        self as u8
    }
}

/// `∃fresh. psi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub fresh: Vec<Var>,
    pub psi: BasicFormula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instantiation {
    pub target: Var,
    pub condition: Condition,
    pub cases: Vec<Case>,
}

/// Nested basic formulae minus the conjuncts already present in the outer one.
fn reduced_children(phi: &NormalFormula) -> Vec<BasicFormula> {
    phi.children
        .iter()
        .map(|c| c.alpha.minus(&phi.alpha))
        .collect()
}

/// The first instantiation condition `u` satisfies, if any.
pub fn condition_for(
    u: &Var,
    phi: &NormalFormula,
    reduced: &[BasicFormula],
    analysis: &SortAnalysis,
) -> Option<Condition> {
    let s = u.sort();
    for (child, red) in phi.children.iter().zip(reduced) {
        if red
            .eqs
            .iter()
            .any(|e| e.lhs == *u && matches!(e.rhs, Rhs::App(..)))
            && !child.alpha.is_properly_reachable(u)
        {
            return Some(Condition::Generator);
        }
    }
    let occurs = reduced.iter().any(|b| b.mentions(u));
    if analysis.is_finite_domain(s) && occurs && !phi.alpha.is_lhs(u) {
        return Some(Condition::FiniteDomain);
    }
    if analysis.finitely_many_finite.contains(&s) && occurs && phi.alpha.fins.contains(u) {
        return Some(Condition::FiniteTrees);
    }
    if analysis.finitely_many_infinite.contains(&s)
        && reduced
            .iter()
            .any(|b| b.eqs.is_empty() && b.fins.contains(u))
    {
        return Some(Condition::InfiniteTrees);
    }
    None
}

/// Every instantiable variable of a formula of depth at most two, in scan
/// order, with the first condition it satisfies.
pub fn instantiable_variables(
    free: &[Var],
    phi: &NormalFormula,
    analysis: &SortAnalysis,
) -> Vec<(Var, Condition)> {
    let reduced = reduced_children(phi);
    free.iter()
        .chain(&phi.bound)
        .filter_map(|u| condition_for(u, phi, &reduced, analysis).map(|c| (u.clone(), c)))
        .collect()
}

/// Picks the variable to instantiate among the candidates.
pub trait SelectionStrategy {
    fn select(&mut self, candidates: &[(Var, Condition)]) -> usize;
}

/// Free variables first, then bound ones, each in order; first match wins.
#[derive(Clone, Copy, Debug, Default)]
pub struct ScanOrder;

impl SelectionStrategy for ScanOrder {
    fn select(&mut self, _candidates: &[(Var, Condition)]) -> usize {
        0
    }
}

/// Finds an instantiable variable and builds its case split.
pub fn find_instantiation(
    free: &[Var],
    phi: &NormalFormula,
    sig: &Signature,
    analysis: &SortAnalysis,
    fresh: &mut FreshNames,
) -> Option<Instantiation> {
    let reduced = reduced_children(phi);
    let (target, condition) = free
        .iter()
        .chain(&phi.bound)
        .find_map(|u| condition_for(u, phi, &reduced, analysis).map(|c| (u.clone(), c)))?;
    Some(build_instantiation(target, condition, sig, analysis, fresh))
}

pub fn build_instantiation(
    target: Var,
    condition: Condition,
    sig: &Signature,
    analysis: &SortAnalysis,
    fresh: &mut FreshNames,
) -> Instantiation {
    let s = target.sort();
    let cases = match condition {
        Condition::Generator => sig
            .generators_of(s)
            .iter()
            .map(|g| {
                let zs: Vec<Var> = sig
                    .generator(*g)
                    .args
                    .iter()
                    .map(|a| fresh.var(*a))
                    .collect();
                Case {
                    psi: BasicFormula {
                        eqs: vec![Equation::app(target.clone(), *g, zs.clone())],
                        fins: vec![],
                    },
                    fresh: zs,
                }
            })
            .collect(),
        Condition::FiniteDomain => analysis
            .fin_terms(s)
            .iter()
            .chain(analysis.infin_terms(s))
            .map(|t| term_case(&target, t, sig, analysis, fresh))
            .collect(),
        Condition::FiniteTrees => analysis
            .fin_terms(s)
            .iter()
            .map(|t| term_case(&target, t, sig, analysis, fresh))
            .collect(),
        Condition::InfiniteTrees => {
            let mut cases = vec![Case {
                fresh: vec![],
                psi: BasicFormula {
                    eqs: vec![],
                    fins: vec![target.clone()],
                },
            }];
            cases.extend(
                analysis
                    .infin_terms(s)
                    .iter()
                    .map(|t| term_case(&target, t, sig, analysis, fresh)),
            );
            cases
        }
    };
    Instantiation {
        target,
        condition,
        cases,
    }
}

/// `∃… u = t ∧ U`, with the reserved variables of `t` renamed apart.
fn term_case(
    u: &Var,
    t: &Term,
    sig: &Signature,
    analysis: &SortAnalysis,
    fresh: &mut FreshNames,
) -> Case {
    let eqs = analysis.equations_for(t);
    let mut rename: HashMap<Var, Var> = HashMap::new();
    let mut renamed = Vec::new();
    for e in &eqs {
        for v in std::iter::once(&e.lhs).chain(e.rhs.vars()) {
            if !rename.contains_key(v) {
                let nv = fresh.named(&format!("$u_{}_", sig.sort_name(v.sort())), v.sort());
                rename.insert(v.clone(), nv.clone());
                renamed.push(nv);
            }
        }
    }
    let t = t.substitute(&rename);
    let mut flat = Flattener {
        sig,
        fresh,
        bound: Vec::new(),
        alpha: BasicFormula::new(),
    };
    flat.define(u, &t);
    let mut psi = flat.alpha;
    let mut vars = flat.bound;
    for e in eqs {
        let lhs = rename[&e.lhs].clone();
        let rhs = match e.rhs {
            Rhs::Var(v) => Rhs::Var(rename[&v].clone()),
            Rhs::App(g, vs) => Rhs::App(g, vs.iter().map(|v| rename[v].clone()).collect()),
        };
        psi.push(Conjunct::Eq(Equation { lhs, rhs }));
    }
    vars.extend(renamed);
    Case { fresh: vars, psi }
}

/// Nesting depth of `v` in `b` through generator equations; cyclic and
/// undefined variables have depth zero.
pub fn var_depth(v: &Var, b: &BasicFormula) -> usize {
    fn go(v: &Var, b: &BasicFormula, memo: &mut HashMap<Var, usize>) -> usize {
        if let Some(d) = memo.get(v) {
            return *d;
        }
        if b.is_properly_reachable(v) {
            memo.insert(v.clone(), 0);
            return 0;
        }
        memo.insert(v.clone(), 0);
        let d = match b.eq_for(v).map(|e| &e.rhs) {
            None => 0,
            Some(Rhs::Var(w)) => go(w, b, memo),
            Some(Rhs::App(_, ws)) => 1 + ws.iter().map(|w| go(w, b, memo)).max().unwrap_or(0),
        };
        memo.insert(v.clone(), d);
        d
    }
    go(v, b, &mut HashMap::new())
}

/// Number of instantiable variables at each depth (deepest first when
/// compared). Used to check that instantiation makes progress.
pub fn termination_measure(
    free: &[Var],
    phi: &NormalFormula,
    analysis: &SortAnalysis,
) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for (u, _) in instantiable_variables(free, phi, analysis) {
        let d = std::iter::once(&phi.alpha)
            .chain(phi.children.iter().map(|c| &c.alpha))
            .filter(|b| b.mentions(&u))
            .map(|b| var_depth(&u, b))
            .max()
            .unwrap_or(0);
        *m.entry(d).or_insert(0) += 1;
    }
    m
}

/// Lexicographic comparison of measures, highest depth first.
pub fn measure_less(a: &BTreeMap<usize, usize>, b: &BTreeMap<usize, usize>) -> bool {
    let top = a.keys().chain(b.keys()).copied().max().unwrap_or(0);
    for d in (0..=top).rev() {
        let (x, y) = (
            a.get(&d).copied().unwrap_or(0),
            b.get(&d).copied().unwrap_or(0),
        );
        if x != y {
            return x < y;
        }
    }
    false
}
