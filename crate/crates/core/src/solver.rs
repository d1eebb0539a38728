//! The decision and simplification procedure.
//!
//! `solve(φ)` normalizes `¬φ` into `¬(∃x̄. α ∧ ⋀φᵢ)`, brings it into a set of
//! solved normal formulae `ψ₁ … ψₙ` of depth at most two whose conjunction is
//! equivalent to `¬φ`, and returns `φ ≡ ¬ψ₁ ∨ … ∨ ¬ψₙ`.

use std::collections::{HashMap, HashSet};
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::SortAnalysis;
use crate::basic::{
    is_solved_basic, solve_basic_with, BasicFormula, BasicOutcome, Equation, Rhs, RuleCounts,
};
use crate::budget::{Budget, Timeout};
use crate::formula::{free_variables, Formula, FreshNames, Term, Var};
use crate::instantiate::{
    build_instantiation, condition_for, instantiable_variables, measure_less, termination_measure,
    Instantiation, SelectionStrategy,
};
use crate::normal::{normalize, NormalFormula, NormalizeError};
use crate::signature::Signature;

pub const DEFAULT_STEP_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Timeout(#[from] Timeout),
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub max_steps: u64,
    pub timeout: Option<Duration>,
    /// Keep every instantiation performed, for inspection.
    pub record_trace: bool,
    /// Check after each instantiation that the termination measure drops.
    pub check_progress: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_steps: DEFAULT_STEP_BUDGET,
            timeout: None,
            record_trace: false,
            check_progress: false,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SolveStats {
    pub basic_rules: RuleCounts,
    pub basic_calls: u64,
    pub nested_conjoin: u64,
    pub restore_outer: u64,
    pub outer_repeated: u64,
    pub unreachable_removed: u64,
    pub depth_reductions: u64,
    pub instantiations: [u64; 4],
    pub progress_checks: u64,
    pub progress_violations: u64,
    pub steps: u64,
}

/// A fully simplified disjunct `∃x̄. α ∧ ⋀¬(∃ȳᵢ. βᵢ)`, kept as the solved
/// normal formula it negates, together with the free-variable order it was
/// solved under. The `βᵢ` still contain `α`'s equations; rendering strips them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplifiedFormula {
    pub free: Vec<Var>,
    pub normal: NormalFormula,
}

impl SimplifiedFormula {
    pub fn bound(&self) -> &[Var] {
        &self.normal.bound
    }

    pub fn alpha(&self) -> &BasicFormula {
        &self.normal.alpha
    }

    /// Output form: nested conjuncts that repeat outer ones are dropped.
    pub fn to_formula(&self) -> Formula {
        self.render(true)
    }

    pub fn to_formula_unstripped(&self) -> Formula {
        self.render(false)
    }

    fn render(&self, strip: bool) -> Formula {
        let mut parts: Vec<Formula> = Vec::new();
        match self.normal.alpha.to_formula() {
            Formula::True => {}
            Formula::And(fs) => parts.extend(fs),
            f => parts.push(f),
        }
        for c in &self.normal.children {
            let beta = if strip {
                c.alpha.minus(&self.normal.alpha)
            } else {
                c.alpha.clone()
            };
            parts.push(Formula::not(Formula::exists(
                c.bound.clone(),
                beta.to_formula(),
            )));
        }
        let body = match parts.len() {
            0 => Formula::True,
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        };
        Formula::exists(self.normal.bound.clone(), body)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    True,
    False,
    Disjunction(Vec<SimplifiedFormula>),
}

impl SolveOutcome {
    pub fn to_formula(&self) -> Formula {
        match self {
            SolveOutcome::True => Formula::True,
            SolveOutcome::False => Formula::False,
            SolveOutcome::Disjunction(ds) if ds.len() == 1 => ds[0].to_formula(),
            SolveOutcome::Disjunction(ds) => {
                Formula::Or(ds.iter().map(SimplifiedFormula::to_formula).collect())
            }
        }
    }

    pub fn is_satisfiable(&self) -> bool {
        !matches!(self, SolveOutcome::False)
    }
}

pub struct Solver<'a> {
    pub sig: &'a Signature,
    pub analysis: &'a SortAnalysis,
    pub config: SolverConfig,
    pub stats: SolveStats,
    pub trace: Vec<Instantiation>,
    strategy: Option<Box<dyn SelectionStrategy + 'a>>,
    fresh: FreshNames,
    budget: Budget,
}

/// Solves `f` with default settings, taking free variables in order of first
/// occurrence.
pub fn solve(
    f: &Formula,
    sig: &Signature,
    analysis: &SortAnalysis,
) -> Result<SolveOutcome, SolveError> {
    let free = free_variables(f);
    Solver::new(sig, analysis, SolverConfig::default()).solve(f, &free)
}

impl<'a> Solver<'a> {
    pub fn new(sig: &'a Signature, analysis: &'a SortAnalysis, config: SolverConfig) -> Self {
        let budget = Budget::new(config.max_steps, config.timeout);
        Solver {
            sig,
            analysis,
            config,
            stats: SolveStats::default(),
            trace: Vec::new(),
            strategy: None,
            fresh: FreshNames::new(),
            budget,
        }
    }

    /// Replaces the default scan order for choosing instantiation targets.
    pub fn with_strategy(mut self, s: Box<dyn SelectionStrategy + 'a>) -> Self {
        self.strategy = Some(s);
        self
    }

    /// Solves `f`, whose free variables must all appear in `free`; their
    /// order there is the base of the variable ordering.
    pub fn solve(&mut self, f: &Formula, free: &[Var]) -> Result<SolveOutcome, SolveError> {
        self.fresh = FreshNames::avoiding(f);
        for v in free {
            self.fresh.observe(v.name());
        }
        let mut free = free.to_vec();
        for v in free_variables(f) {
            if !free.contains(&v) {
                free.push(v);
            }
        }
        let top = normalize(&Formula::not(f.clone()), self.sig, &mut self.fresh)?;
        let result = self.solve_normal(&free, top);
        self.stats.steps = self.budget.used();
        let results = result?;
        if results.is_empty() {
            return Ok(SolveOutcome::False);
        }
        // ¬true among the conjuncts makes the disjunction true.
        if results.iter().any(NormalFormula::is_not_true) {
            return Ok(SolveOutcome::True);
        }
        Ok(SolveOutcome::Disjunction(
            results
                .into_iter()
                .map(|normal| SimplifiedFormula {
                    free: free.clone(),
                    normal,
                })
                .collect(),
        ))
    }

    /// Solved normal formulae whose conjunction is equivalent to `phi`.
    pub fn solve_normal(
        &mut self,
        free: &[Var],
        phi: NormalFormula,
    ) -> Result<Vec<NormalFormula>, SolveError> {
        let order: Vec<Var> = free.iter().chain(&phi.bound).cloned().collect();
        let Some(alpha) = self.basic(&order, &phi.alpha)? else {
            return Ok(Vec::new());
        };
        Ok(self.solve_nested(free, NormalFormula { alpha, ..phi })?)
    }

    fn basic(&mut self, order: &[Var], b: &BasicFormula) -> Result<Option<BasicFormula>, Timeout> {
        self.stats.basic_calls += 1;
        self.budget.tick()?;
        match solve_basic_with(
            order,
            b,
            self.analysis,
            &mut self.budget,
            &mut self.stats.basic_rules,
        )? {
            BasicOutcome::Solved(b) => Ok(Some(b)),
            BasicOutcome::Contradiction(_) => Ok(None),
        }
    }

    /// `phi`'s outer basic formula must already be solved.
    pub fn solve_nested(
        &mut self,
        free: &[Var],
        phi: NormalFormula,
    ) -> Result<Vec<NormalFormula>, Timeout> {
        let ctx: Vec<Var> = free.iter().chain(&phi.bound).cloned().collect();
        let mut collected = Vec::new();
        for child in phi.children {
            self.stats.nested_conjoin += 1;
            let beta = phi.alpha.conjoin(&child.alpha);
            let order: Vec<Var> = ctx.iter().chain(&child.bound).cloned().collect();
            let Some(mut beta) = self.basic(&order, &beta)? else {
                continue;
            };
            self.restore_outer(&mut beta, &phi.alpha);
            debug_assert!(is_solved_basic(&order, &beta, self.analysis));
            let sub = NormalFormula {
                bound: child.bound,
                alpha: beta,
                children: child.children,
            };
            collected.extend(self.solve_nested(&ctx, sub)?);
        }
        self.solve_final(
            free,
            NormalFormula {
                bound: phi.bound,
                alpha: phi.alpha,
                children: collected,
            },
        )
    }

    /// Puts back the outer formula's equations where solving the nested
    /// formula rewrote them.
    fn restore_outer(&mut self, beta: &mut BasicFormula, alpha: &BasicFormula) {
        let outer: HashMap<&Var, &Rhs> = alpha.eqs.iter().map(|e| (&e.lhs, &e.rhs)).collect();
        for e in beta.eqs.iter_mut() {
            if let Some(rhs) = outer.get(&e.lhs) {
                if e.rhs != **rhs {
                    e.rhs = (*rhs).clone();
                    self.stats.restore_outer += 1;
                }
            }
        }
    }

    /// `phi` has depth at most three and its children are solved.
    pub fn solve_final(
        &mut self,
        free: &[Var],
        mut phi: NormalFormula,
    ) -> Result<Vec<NormalFormula>, Timeout> {
        self.budget.tick()?;
        if phi
            .children
            .iter()
            .any(|c| c.children.is_empty() && c.alpha.is_subset_of(&phi.alpha))
        {
            self.stats.outer_repeated += 1;
            return Ok(Vec::new());
        }
        if let Some(j) = phi.children.iter().position(|c| c.depth() >= 2) {
            self.stats.depth_reductions += 1;
            let cj = phi.children.remove(j);
            let rest = phi.children;
            let mut psi_children = vec![NormalFormula::new(cj.bound.clone(), cj.alpha, Vec::new())];
            psi_children.extend(rest.iter().cloned());
            let psi = NormalFormula::new(phi.bound.clone(), phi.alpha, psi_children);
            let mut out = self.solve_final(free, psi)?;
            for g in cj.children {
                // The lifted variables join a scope shared with the other
                // children, which may bind the same names.
                let mut rename: HashMap<Var, Var> = HashMap::new();
                for v in cj.bound.iter().chain(&g.bound) {
                    rename.insert(v.clone(), self.fresh.var(v.sort()));
                }
                let bound: Vec<Var> = phi
                    .bound
                    .iter()
                    .chain(cj.bound.iter().chain(&g.bound).map(|v| &rename[v]))
                    .cloned()
                    .collect();
                // Orientation of the lifted equations follows the new order.
                let order: Vec<Var> = free.iter().chain(&bound).cloned().collect();
                let Some(alpha) = self.basic(&order, &g.alpha.rename(&rename))? else {
                    continue;
                };
                let chi = NormalFormula::new(bound, alpha, rest.clone());
                out.extend(self.solve_nested(free, chi)?);
            }
            return Ok(out);
        }
        let chosen = match self.strategy.as_mut() {
            None => {
                let reduced: Vec<BasicFormula> = phi
                    .children
                    .iter()
                    .map(|c| c.alpha.minus(&phi.alpha))
                    .collect();
                free.iter().chain(&phi.bound).find_map(|u| {
                    condition_for(u, &phi, &reduced, self.analysis).map(|c| (u.clone(), c))
                })
            }
            Some(s) => {
                let cands = instantiable_variables(free, &phi, self.analysis);
                if cands.is_empty() {
                    None
                } else {
                    let i = s.select(&cands).min(cands.len() - 1);
                    Some(cands[i].clone())
                }
            }
        };
        if let Some((target, condition)) = chosen {
            let inst =
                build_instantiation(target, condition, self.sig, self.analysis, &mut self.fresh);
            self.stats.instantiations[condition.number() as usize - 1] += 1;
            let measure = self
                .config
                .check_progress
                .then(|| termination_measure(free, &phi, self.analysis));
            let mut out = Vec::new();
            for case in &inst.cases {
                let bound: Vec<Var> = phi.bound.iter().chain(&case.fresh).cloned().collect();
                let order: Vec<Var> = free.iter().chain(&bound).cloned().collect();
                let Some(alpha) = self.basic(&order, &phi.alpha.conjoin(&case.psi))? else {
                    continue;
                };
                let next = NormalFormula::new(bound, alpha, phi.children.clone());
                if let Some(m) = &measure {
                    self.check_progress(free, &next, m)?;
                }
                out.extend(self.solve_nested(free, next)?);
            }
            if self.config.record_trace {
                self.trace.push(inst);
            }
            return Ok(out);
        }
        self.stats.unreachable_removed += 1;
        let mut reduced = remove_unreachable_parts(free, &phi);
        // Variables moved into nested formulas rank later than before, which
        // may flip the orientation of their equations.
        let outer: Vec<Var> = free.iter().chain(&reduced.bound).cloned().collect();
        let mut children = Vec::new();
        let mut resolved = false;
        for c in std::mem::take(&mut reduced.children) {
            let order: Vec<Var> = outer.iter().chain(&c.bound).cloned().collect();
            if is_solved_basic(&order, &c.alpha, self.analysis) {
                children.push(c);
                continue;
            }
            resolved = true;
            let Some(mut beta) = self.basic(&order, &c.alpha)? else {
                continue;
            };
            self.restore_outer(&mut beta, &reduced.alpha);
            children.push(prune_nested(&c.bound, &beta));
        }
        reduced.children = children;
        if resolved {
            // The new orientation may make a variable instantiable again.
            return self.solve_final(free, reduced);
        }
        if reduced
            .children
            .iter()
            .any(|c| c.alpha.is_subset_of(&reduced.alpha))
        {
            return Ok(Vec::new());
        }
        Ok(vec![reduced])
    }

    fn check_progress(
        &mut self,
        free: &[Var],
        next: &NormalFormula,
        before: &std::collections::BTreeMap<usize, usize>,
    ) -> Result<(), Timeout> {
        let ctx: Vec<Var> = free.iter().chain(&next.bound).cloned().collect();
        let mut children = Vec::new();
        for c in &next.children {
            let order: Vec<Var> = ctx.iter().chain(&c.bound).cloned().collect();
            let mut counts = RuleCounts::default();
            let mut budget = Budget::unlimited();
            if let BasicOutcome::Solved(mut b) = solve_basic_with(
                &order,
                &next.alpha.conjoin(&c.alpha),
                self.analysis,
                &mut budget,
                &mut counts,
            )? {
                self.restore_outer(&mut b, &next.alpha);
                children.push(NormalFormula::new(c.bound.clone(), b, c.children.clone()));
            }
        }
        let after = termination_measure(
            free,
            &NormalFormula::new(next.bound.clone(), next.alpha.clone(), children),
            self.analysis,
        );
        self.stats.progress_checks += 1;
        if !measure_less(&after, before) {
            self.stats.progress_violations += 1;
        }
        Ok(())
    }
}

/// Drops the parts of a solved depth-two formula that cannot be reached from
/// its free variables, and the nested formulae that constrain variables
/// which are unconstrained outside.
pub fn remove_unreachable_parts(free: &[Var], phi: &NormalFormula) -> NormalFormula {
    let reach = phi.alpha.reachable_from(free);
    let bound_kept: Vec<Var> = phi
        .bound
        .iter()
        .filter(|v| reach.contains(v))
        .cloned()
        .collect();
    let alpha_kept = BasicFormula {
        eqs: phi
            .alpha
            .eqs
            .iter()
            .filter(|e| reach.contains(&e.lhs))
            .cloned()
            .collect(),
        fins: phi
            .alpha
            .fins
            .iter()
            .filter(|v| reach.contains(v))
            .cloned()
            .collect(),
    };
    let dropped_fins: Vec<Var> = phi
        .alpha
        .fins
        .iter()
        .filter(|v| !reach.contains(v))
        .cloned()
        .collect();
    let moved: Vec<Var> = phi
        .bound
        .iter()
        .filter(|v| !reach.contains(v) && phi.alpha.is_lhs(v))
        .cloned()
        .collect();
    let loose: HashSet<Var> = phi
        .bound
        .iter()
        .filter(|v| !reach.contains(v) && !phi.alpha.is_lhs(v))
        .cloned()
        .collect();
    let mut children = Vec::new();
    for c in &phi.children {
        let beta = BasicFormula {
            eqs: c.alpha.eqs.clone(),
            fins: c
                .alpha
                .fins
                .iter()
                .filter(|v| !dropped_fins.contains(v))
                .cloned()
                .collect(),
        };
        let local: Vec<Var> = moved.iter().chain(&c.bound).cloned().collect();
        let child = prune_nested(&local, &beta);
        if child.alpha.vars().iter().any(|v| loose.contains(v)) {
            continue;
        }
        children.push(child);
    }
    NormalFormula::new(bound_kept, alpha_kept, children)
}

/// `¬(∃local. beta)` without the parts unreachable from its free variables.
fn prune_nested(local: &[Var], beta: &BasicFormula) -> NormalFormula {
    let starts: Vec<Var> = beta
        .vars()
        .into_iter()
        .filter(|v| !local.contains(v))
        .collect();
    let r = beta.reachable_from(&starts);
    let kept = BasicFormula {
        eqs: beta
            .eqs
            .iter()
            .filter(|e| r.contains(&e.lhs))
            .cloned()
            .collect(),
        fins: beta
            .fins
            .iter()
            .filter(|v| r.contains(v))
            .cloned()
            .collect(),
    };
    let bound: Vec<Var> = local.iter().filter(|v| r.contains(v)).cloned().collect();
    NormalFormula::new(bound, kept, Vec::new())
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("condition {condition} violated: {detail}")]
pub struct Violation {
    pub condition: u8,
    pub detail: String,
}

fn violation(condition: u8, detail: impl Into<String>) -> Result<(), Violation> {
    Err(Violation {
        condition,
        detail: detail.into(),
    })
}

/// Checks the five solved-form conditions on `ψ = ¬(∃x̄. α ∧ ⋀¬(∃ȳᵢ. βᵢ))`
/// (the negation of a disjunct): solved basic formulae, `α`'s equations
/// repeated in every `βᵢ`, every `βᵢ` adding something, no instantiable
/// variable, and every bound variable reachable.
pub fn check_solved(
    free: &[Var],
    psi: &NormalFormula,
    analysis: &SortAnalysis,
) -> Result<(), Violation> {
    let outer: Vec<Var> = free.iter().chain(&psi.bound).cloned().collect();
    if !is_solved_basic(&outer, &psi.alpha, analysis) {
        return violation(1, "outer basic formula not solved");
    }
    for c in &psi.children {
        if !c.children.is_empty() {
            return violation(1, "nesting deeper than two");
        }
        let order: Vec<Var> = outer.iter().chain(&c.bound).cloned().collect();
        if !is_solved_basic(&order, &c.alpha, analysis) {
            return violation(1, "nested basic formula not solved");
        }
        if let Some(e) = psi.alpha.eqs.iter().find(|e| !c.alpha.eqs.contains(e)) {
            return violation(
                2,
                format!(
                    "outer equation for {} missing from a nested formula",
                    e.lhs.name()
                ),
            );
        }
        if c.alpha.is_subset_of(&psi.alpha) {
            return violation(3, "nested formula adds nothing to the outer one");
        }
    }
    if let Some((v, cond)) = instantiable_variables(free, psi, analysis).first() {
        return violation(
            4,
            format!(
                "{} is instantiable by condition {}",
                v.name(),
                cond.number()
            ),
        );
    }
    let reach = psi.alpha.reachable_from(free);
    if let Some(v) = psi.bound.iter().find(|v| !reach.contains(v)) {
        return violation(5, format!("{} unreachable", v.name()));
    }
    for c in &psi.children {
        let r = c.alpha.reachable_from(&outer);
        if let Some(v) = c.bound.iter().find(|v| !r.contains(v)) {
            return violation(5, format!("{} unreachable in a nested formula", v.name()));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("not of the form ∃x̄. α ∧ ⋀¬(∃ȳ. β)")]
    Shape,
    #[error("atom is not flat: {0}")]
    NotFlat(String),
}

fn basic_of_atoms(atoms: &[Formula]) -> Result<BasicFormula, ShapeError> {
    let mut b = BasicFormula::new();
    for a in atoms {
        match a {
            Formula::True => {}
            Formula::Fin(Term::Var(v)) => b.fins.push(v.clone()),
            Formula::Eq(Term::Var(x), Term::Var(y)) => {
                b.eqs.push(Equation::var(x.clone(), y.clone()))
            }
            Formula::Eq(Term::Var(x), Term::App(g, args)) => {
                let vs = args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => Ok(v.clone()),
                        _ => Err(ShapeError::NotFlat(format!("{a:?}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                b.eqs.push(Equation::app(x.clone(), *g, vs));
            }
            other => return Err(ShapeError::NotFlat(format!("{other:?}"))),
        }
    }
    Ok(b)
}

fn conjuncts(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::And(fs) => fs.iter().flat_map(conjuncts).collect(),
        Formula::True => Vec::new(),
        other => vec![other.clone()],
    }
}

/// Reads a rendered disjunct back into the normal formula it negates. The
/// outer equations are added back into every nested formula, undoing the
/// stripping done on output.
pub fn read_simplified(f: &Formula) -> Result<NormalFormula, ShapeError> {
    let (bound, body) = match f {
        Formula::Exists(vs, b) => (vs.clone(), &**b),
        other => (Vec::new(), other),
    };
    let mut atoms = Vec::new();
    let mut negs = Vec::new();
    for c in conjuncts(body) {
        match c {
            Formula::Not(inner) => {
                let (ys, b) = match &*inner {
                    Formula::Exists(ys, b) => (ys.clone(), &**b),
                    other => (Vec::new(), other),
                };
                let atoms = conjuncts(b);
                if atoms.iter().any(|a| !a.is_atom()) {
                    return Err(ShapeError::Shape);
                }
                negs.push((ys, basic_of_atoms(&atoms)?));
            }
            a if a.is_atom() => atoms.push(a),
            _ => return Err(ShapeError::Shape),
        }
    }
    let alpha = basic_of_atoms(&atoms)?;
    let children = negs
        .into_iter()
        .map(|(ys, b)| {
            let mut full = BasicFormula {
                eqs: alpha.eqs.clone(),
                fins: Vec::new(),
            };
            full = full.conjoin(&b);
            NormalFormula::new(ys, full, Vec::new())
        })
        .collect();
    Ok(NormalFormula::new(bound, alpha, children))
}

/// Whether a rendered disjunct is fully simplified with respect to the given
/// free-variable order.
pub fn is_fully_simplified(
    f: &Formula,
    free: &[Var],
    analysis: &SortAnalysis,
) -> Result<(), Violation> {
    let psi = read_simplified(f).map_err(|e| Violation {
        condition: 0,
        detail: e.to_string(),
    })?;
    check_solved(free, &psi, analysis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::example_signature;

    fn setup() -> (Signature, SortAnalysis) {
        let sig = example_signature();
        let an = SortAnalysis::compute(&sig).unwrap();
        (sig, an)
    }

    #[test]
    fn true_and_false() {
        let (sig, an) = setup();
        assert_eq!(
            solve(&Formula::True, &sig, &an).unwrap(),
            SolveOutcome::True
        );
        assert_eq!(
            solve(&Formula::False, &sig, &an).unwrap(),
            SolveOutcome::False
        );
    }

    #[test]
    fn list_is_nil_or_cons() {
        let (sig, an) = setup();
        let list = sig.sort("list").unwrap();
        let nat = sig.sort("nat").unwrap();
        let x = Var::new("x", list);
        let (y, z) = (Var::new("y", nat), Var::new("z", list));
        let nil = sig.generator_by_name("nil").unwrap();
        let cons = sig.generator_by_name("cons").unwrap();
        let phi1 = Formula::not(Formula::exists(
            vec![x.clone()],
            Formula::and(vec![
                Formula::not(Formula::eq(Term::var(&x), Term::constant(nil))),
                Formula::not(Formula::exists(
                    vec![y.clone(), z.clone()],
                    Formula::eq(
                        Term::var(&x),
                        Term::App(cons, vec![Term::var(&y), Term::var(&z)]),
                    ),
                )),
            ]),
        ));
        let mut solver = Solver::new(
            &sig,
            &an,
            SolverConfig {
                record_trace: true,
                ..Default::default()
            },
        );
        assert_eq!(solver.solve(&phi1, &[]).unwrap(), SolveOutcome::True);
        assert_eq!(solver.trace.len(), 1);
        assert_eq!(solver.trace[0].cases.len(), 2);
    }

    #[test]
    fn cyclic_nat_is_not_finite() {
        let (sig, an) = setup();
        let nat = sig.sort("nat").unwrap();
        let succ = sig.generator_by_name("succ").unwrap();
        let x = Var::new("x", nat);
        let f = Formula::exists(
            vec![x.clone()],
            Formula::and(vec![
                Formula::eq(Term::var(&x), Term::App(succ, vec![Term::var(&x)])),
                Formula::fin(Term::var(&x)),
            ]),
        );
        assert_eq!(solve(&f, &sig, &an).unwrap(), SolveOutcome::False);
    }

    #[test]
    fn open_result_is_simplified() {
        let (sig, an) = setup();
        let nat = sig.sort("nat").unwrap();
        let succ = sig.generator_by_name("succ").unwrap();
        let x = Var::new("x", nat);
        let y = Var::new("y", nat);
        let f = Formula::and(vec![
            Formula::eq(Term::var(&x), Term::App(succ, vec![Term::var(&y)])),
            Formula::not(Formula::fin(Term::var(&y))),
        ]);
        let out = solve(&f, &sig, &an).unwrap();
        let SolveOutcome::Disjunction(ds) = out else {
            panic!("expected a disjunction, got {out:?}")
        };
        for d in &ds {
            check_solved(&d.free, &d.normal, &an).unwrap();
            is_fully_simplified(&d.to_formula(), &d.free, &an).unwrap();
        }
    }
}
