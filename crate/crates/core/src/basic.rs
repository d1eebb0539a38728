//! Basic formulae: conjunctions of flat equations and `fin` atoms, and the
//! rewrite system that brings them into solved form.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::analysis::SortAnalysis;
use crate::budget::{Budget, Timeout};
use crate::formula::{Formula, Term, Var};
use crate::signature::{GenId, Signature};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rhs {
    Var(Var),
    App(GenId, Vec<Var>),
}

impl Rhs {
    pub fn vars(&self) -> &[Var] {
        match self {
            Rhs::Var(v) => std::slice::from_ref(v),
            Rhs::App(_, vs) => vs,
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Rhs::Var(v) => Term::var(v),
            Rhs::App(g, vs) => Term::App(*g, vs.iter().map(Term::var).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub lhs: Var,
    pub rhs: Rhs,
}

impl Equation {
    pub fn var(lhs: Var, rhs: Var) -> Self {
        Equation {
            lhs,
            rhs: Rhs::Var(rhs),
        }
    }

    pub fn app(lhs: Var, g: GenId, args: Vec<Var>) -> Self {
        Equation {
            lhs,
            rhs: Rhs::App(g, args),
        }
    }

    pub fn to_formula(&self) -> Formula {
        Formula::eq(Term::var(&self.lhs), self.rhs.to_term())
    }

    pub fn to_sexpr(&self, sig: &Signature) -> String {
        crate::formula::to_sexpr(&self.to_formula(), sig)
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.lhs == *v || self.rhs.vars().contains(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Conjunct {
    Eq(Equation),
    Fin(Var),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BasicFormula {
    pub eqs: Vec<Equation>,
    pub fins: Vec<Var>,
}

impl BasicFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.eqs.is_empty() && self.fins.is_empty()
    }

    pub fn len(&self) -> usize {
        self.eqs.len() + self.fins.len()
    }

    /// Number of symbols: one per atom plus one per variable occurrence.
    pub fn size(&self) -> usize {
        self.eqs
            .iter()
            .map(|e| 2 + e.rhs.vars().len())
            .sum::<usize>()
            + 2 * self.fins.len()
    }

    pub fn conjuncts(&self) -> impl Iterator<Item = Conjunct> + '_ {
        self.eqs
            .iter()
            .cloned()
            .map(Conjunct::Eq)
            .chain(self.fins.iter().cloned().map(Conjunct::Fin))
    }

    pub fn contains(&self, c: &Conjunct) -> bool {
        match c {
            Conjunct::Eq(e) => self.eqs.contains(e),
            Conjunct::Fin(v) => self.fins.contains(v),
        }
    }

    pub fn push(&mut self, c: Conjunct) {
        match c {
            Conjunct::Eq(e) => self.eqs.push(e),
            Conjunct::Fin(v) => self.fins.push(v),
        }
    }

    /// Conjunction of both, keeping one copy of shared atoms.
    pub fn conjoin(&self, other: &BasicFormula) -> BasicFormula {
        let mut out = self.clone();
        for c in other.conjuncts() {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    /// The conjuncts of `self` that do not occur in `other`.
    pub fn minus(&self, other: &BasicFormula) -> BasicFormula {
        BasicFormula {
            eqs: self
                .eqs
                .iter()
                .filter(|e| !other.eqs.contains(e))
                .cloned()
                .collect(),
            fins: self
                .fins
                .iter()
                .filter(|v| !other.fins.contains(v))
                .cloned()
                .collect(),
        }
    }

    /// Same atoms, ignoring order and repetition.
    pub fn same_atoms(&self, other: &BasicFormula) -> bool {
        self.conjuncts().all(|c| other.contains(&c)) && other.conjuncts().all(|c| self.contains(&c))
    }

    pub fn is_subset_of(&self, other: &BasicFormula) -> bool {
        self.conjuncts().all(|c| other.contains(&c))
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for e in &self.eqs {
            for v in std::iter::once(&e.lhs).chain(e.rhs.vars()) {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        }
        for v in &self.fins {
            if seen.insert(v.clone()) {
                out.push(v.clone());
            }
        }
        out
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.fins.contains(v) || self.eqs.iter().any(|e| e.mentions(v))
    }

    pub fn is_lhs(&self, v: &Var) -> bool {
        self.eqs.iter().any(|e| e.lhs == *v)
    }

    pub fn eq_for(&self, v: &Var) -> Option<&Equation> {
        self.eqs.iter().find(|e| e.lhs == *v)
    }

    pub fn to_formula(&self) -> Formula {
        let mut atoms: Vec<Formula> = self.eqs.iter().map(Equation::to_formula).collect();
        atoms.extend(self.fins.iter().map(|v| Formula::fin(Term::var(v))));
        match atoms.len() {
            0 => Formula::True,
            1 => atoms.pop().unwrap(),
            _ => Formula::And(atoms),
        }
    }

    /// Lhs-to-rhs successor lists.
    fn successors(&self) -> HashMap<&Var, Vec<&Var>> {
        let mut m: HashMap<&Var, Vec<&Var>> = HashMap::new();
        for e in &self.eqs {
            m.entry(&e.lhs).or_default().extend(e.rhs.vars());
        }
        m
    }

    /// Variables reachable from `starts` (inclusive) along lhs-to-rhs edges.
    pub fn reachable_from<'a>(&self, starts: impl IntoIterator<Item = &'a Var>) -> HashSet<Var> {
        let succ = self.successors();
        let mut seen: HashSet<Var> = HashSet::new();
        let mut stack: Vec<Var> = starts.into_iter().cloned().collect();
        while let Some(v) = stack.pop() {
            if !seen.insert(v.clone()) {
                continue;
            }
            if let Some(next) = succ.get(&v) {
                stack.extend(next.iter().map(|w| (*w).clone()));
            }
        }
        seen
    }

    /// Whether `v` is reachable from itself by a chain of at least one edge.
    pub fn is_properly_reachable(&self, v: &Var) -> bool {
        let succ = self.successors();
        let mut seen: HashSet<&Var> = HashSet::new();
        let mut stack: Vec<&Var> = succ.get(v).cloned().unwrap_or_default();
        while let Some(w) = stack.pop() {
            if w == v {
                return true;
            }
            if seen.insert(w) {
                if let Some(next) = succ.get(w) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        false
    }

    /// Applies a variable renaming to every atom.
    pub fn rename(&self, map: &HashMap<Var, Var>) -> BasicFormula {
        let r = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
        BasicFormula {
            eqs: self
                .eqs
                .iter()
                .map(|e| Equation {
                    lhs: r(&e.lhs),
                    rhs: match &e.rhs {
                        Rhs::Var(w) => Rhs::Var(r(w)),
                        Rhs::App(g, ws) => Rhs::App(*g, ws.iter().map(r).collect()),
                    },
                })
                .collect(),
            fins: self.fins.iter().map(r).collect(),
        }
    }

    pub fn to_sexpr(&self, sig: &Signature) -> String {
        crate::formula::to_sexpr(&self.to_formula(), sig)
    }
}

/// Position of each variable in the nesting order. Variables missing from the
/// order rank after all listed ones, in first-seen order.
#[derive(Clone, Debug, Default)]
pub struct VarOrder {
    rank: HashMap<Var, usize>,
}

impl VarOrder {
    pub fn new(order: &[Var]) -> Self {
        let mut rank = HashMap::with_capacity(order.len());
        for (i, v) in order.iter().enumerate() {
            rank.entry(v.clone()).or_insert(i);
        }
        VarOrder { rank }
    }

    fn extend_with(&mut self, b: &BasicFormula) {
        for v in b.vars() {
            let n = self.rank.len();
            self.rank.entry(v).or_insert(n);
        }
    }

    pub fn rank(&self, v: &Var) -> usize {
        self.rank.get(v).copied().unwrap_or(usize::MAX)
    }

    pub fn less(&self, a: &Var, b: &Var) -> bool {
        self.rank(a) < self.rank(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ContradictionRule {
    /// Two different generators for the same variable.
    Clash,
    /// `fin` on a variable lying on a cycle.
    FinCycle,
    /// `fin` on a sort without finite trees.
    FinWithoutFiniteTrees,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasicOutcome {
    Solved(BasicFormula),
    Contradiction(ContradictionRule),
}

impl BasicOutcome {
    pub fn solved(self) -> Option<BasicFormula> {
        match self {
            BasicOutcome::Solved(b) => Some(b),
            BasicOutcome::Contradiction(_) => None,
        }
    }
}

/// Application counters for the rewrite rules, indexed as named.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RuleCounts {
    pub drop_trivial: u64,
    pub orient: u64,
    pub shift_to_smaller: u64,
    pub clash: u64,
    pub decompose: u64,
    pub dedupe_fin: u64,
    pub fin_through_var: u64,
    pub fin_cycle: u64,
    pub fin_through_app: u64,
    pub fin_drop_no_infinite: u64,
    pub fin_no_finite: u64,
}

impl RuleCounts {
    pub fn total(&self) -> u64 {
        self.drop_trivial
            + self.orient
            + self.shift_to_smaller
            + self.clash
            + self.decompose
            + self.dedupe_fin
            + self.fin_through_var
            + self.fin_cycle
            + self.fin_through_app
            + self.fin_drop_no_infinite
            + self.fin_no_finite
    }

    pub fn add(&mut self, o: &RuleCounts) {
        self.drop_trivial += o.drop_trivial;
        self.orient += o.orient;
        self.shift_to_smaller += o.shift_to_smaller;
        self.clash += o.clash;
        self.decompose += o.decompose;
        self.dedupe_fin += o.dedupe_fin;
        self.fin_through_var += o.fin_through_var;
        self.fin_cycle += o.fin_cycle;
        self.fin_through_app += o.fin_through_app;
        self.fin_drop_no_infinite += o.fin_drop_no_infinite;
        self.fin_no_finite += o.fin_no_finite;
    }
}

/// Solves `b` with respect to `order` with no step limit.
pub fn solve_basic(order: &[Var], b: &BasicFormula, analysis: &SortAnalysis) -> BasicOutcome {
    let mut counts = RuleCounts::default();
    solve_basic_with(order, b, analysis, &mut Budget::unlimited(), &mut counts)
        .expect("unlimited budget never runs out")
}

/// Deterministic rule scheduling: the equation rules are applied in sweeps
/// until none applies, then the `fin` rules likewise.
pub fn solve_basic_with(
    order: &[Var],
    b: &BasicFormula,
    analysis: &SortAnalysis,
    budget: &mut Budget,
    counts: &mut RuleCounts,
) -> Result<BasicOutcome, Timeout> {
    let mut ord = VarOrder::new(order);
    ord.extend_with(b);
    let mut eqs = b.eqs.clone();
    loop {
        let mut changed = false;
        let before = eqs.len();
        eqs.retain(|e| e.rhs != Rhs::Var(e.lhs.clone()));
        let dropped = (before - eqs.len()) as u64;
        counts.drop_trivial += dropped;
        budget.charge(dropped)?;
        changed |= dropped > 0;
        for e in eqs.iter_mut() {
            if let Rhs::Var(u) = &e.rhs {
                if ord.less(&e.lhs, u) {
                    let u = u.clone();
                    e.rhs = Rhs::Var(std::mem::replace(&mut e.lhs, u));
                    counts.orient += 1;
                    budget.tick()?;
                    changed = true;
                }
            }
        }
        if changed {
            continue;
        }
        let mut groups: HashMap<Var, Vec<usize>> = HashMap::new();
        let mut lhs_order = Vec::new();
        for (i, e) in eqs.iter().enumerate() {
            let g = groups.entry(e.lhs.clone()).or_default();
            if g.is_empty() {
                lhs_order.push(e.lhs.clone());
            }
            g.push(i);
        }
        let mut removed = vec![false; eqs.len()];
        let mut added = Vec::new();
        for v in lhs_order {
            let idxs = &groups[&v];
            if idxs.len() < 2 {
                continue;
            }
            let pivot = idxs
                .iter()
                .copied()
                .find(|i| matches!(eqs[*i].rhs, Rhs::Var(_)));
            if let Some(p) = pivot {
                let Rhs::Var(u) = eqs[p].rhs.clone() else {
                    unreachable!()
                };
                for &k in idxs {
                    if k != p {
                        eqs[k].lhs = u.clone();
                        counts.shift_to_smaller += 1;
                        budget.tick()?;
                    }
                }
            } else {
                let first = idxs[0];
                let Rhs::App(f, ys) = eqs[first].rhs.clone() else {
                    unreachable!()
                };
                for &k in &idxs[1..] {
                    let Rhs::App(g, zs) = &eqs[k].rhs else {
                        unreachable!()
                    };
                    budget.tick()?;
                    if *g != f {
                        counts.clash += 1;
                        return Ok(BasicOutcome::Contradiction(ContradictionRule::Clash));
                    }
                    counts.decompose += 1;
                    removed[k] = true;
                    for (y, z) in ys.iter().zip(zs) {
                        added.push(Equation::var(y.clone(), z.clone()));
                    }
                }
            }
            changed = true;
        }
        if !changed {
            break;
        }
        let mut i = 0;
        eqs.retain(|_| {
            i += 1;
            !removed[i - 1]
        });
        eqs.extend(added);
    }

    let lhs: HashMap<Var, Rhs> = eqs.iter().map(|e| (e.lhs.clone(), e.rhs.clone())).collect();
    let solved_eqs = BasicFormula {
        eqs,
        fins: Vec::new(),
    };
    let mut cyclic: HashMap<Var, bool> = HashMap::new();
    let mut fins = b.fins.clone();
    loop {
        let mut changed = false;
        let mut seen = HashSet::new();
        let before = fins.len();
        fins.retain(|v| seen.insert(v.clone()));
        let dup = (before - fins.len()) as u64;
        counts.dedupe_fin += dup;
        budget.charge(dup)?;
        changed |= dup > 0;
        for v in &fins {
            let cyc = *cyclic
                .entry(v.clone())
                .or_insert_with(|| solved_eqs.is_properly_reachable(v));
            if cyc {
                counts.fin_cycle += 1;
                budget.tick()?;
                return Ok(BasicOutcome::Contradiction(ContradictionRule::FinCycle));
            }
            if analysis.no_finite.contains(&v.sort()) {
                counts.fin_no_finite += 1;
                budget.tick()?;
                return Ok(BasicOutcome::Contradiction(
                    ContradictionRule::FinWithoutFiniteTrees,
                ));
            }
        }
        let mut next = Vec::with_capacity(fins.len());
        for v in fins {
            match lhs.get(&v) {
                Some(Rhs::Var(u)) => {
                    counts.fin_through_var += 1;
                    budget.tick()?;
                    next.push(u.clone());
                    changed = true;
                }
                Some(Rhs::App(_, ys)) => {
                    counts.fin_through_app += 1;
                    budget.tick()?;
                    next.extend(ys.iter().cloned());
                    changed = true;
                }
                None if analysis.no_infinite.contains(&v.sort()) => {
                    counts.fin_drop_no_infinite += 1;
                    budget.tick()?;
                    changed = true;
                }
                None => next.push(v),
            }
        }
        fins = next;
        if !changed {
            break;
        }
    }
    Ok(BasicOutcome::Solved(BasicFormula {
        eqs: solved_eqs.eqs,
        fins,
    }))
}

/// Checks the solved-form conditions: lhs and `fin` variables pairwise
/// distinct, variable equations oriented downwards, and `fin` only on sorts
/// with both finite and infinite trees.
pub fn is_solved_basic(order: &[Var], b: &BasicFormula, analysis: &SortAnalysis) -> bool {
    let mut ord = VarOrder::new(order);
    ord.extend_with(b);
    let mut seen = HashSet::new();
    for v in b.eqs.iter().map(|e| &e.lhs).chain(&b.fins) {
        if !seen.insert(v) {
            return false;
        }
    }
    let oriented = b.eqs.iter().all(|e| match &e.rhs {
        Rhs::Var(u) => ord.less(u, &e.lhs),
        Rhs::App(..) => true,
    });
    oriented
        && b.fins
            .iter()
            .all(|v| analysis.has_finite(v.sort()) && analysis.has_infinite(v.sort()))
}

#[derive(Clone, Debug)]
enum Step {
    DropTrivial(usize),
    Orient(usize),
    Shift(usize, usize),
    Decompose(usize, usize),
    DedupeFin(usize),
    FinVar(usize, Var),
    FinApp(usize, Vec<Var>),
    FinCycle,
    FinNoFinite,
    FinDrop(usize),
}

/// Runs the rewrite system choosing among all applicable rule instances with
/// `choose(n)`, which must return an index below `n`. Contradiction rules take
/// priority since they end the run whenever they apply. Returns the outcome
/// and the number of steps taken, or `None` if `max_steps` was exceeded.
pub fn solve_basic_scheduled(
    order: &[Var],
    b: &BasicFormula,
    analysis: &SortAnalysis,
    choose: &mut dyn FnMut(usize) -> usize,
    max_steps: usize,
) -> Option<(BasicOutcome, usize)> {
    let mut ord = VarOrder::new(order);
    ord.extend_with(b);
    let mut eqs = b.eqs.clone();
    let mut steps = 0usize;
    loop {
        let mut cands = Vec::new();
        let mut clash = false;
        for (i, e) in eqs.iter().enumerate() {
            match &e.rhs {
                Rhs::Var(u) if *u == e.lhs => cands.push(Step::DropTrivial(i)),
                Rhs::Var(u) if ord.less(&e.lhs, u) => cands.push(Step::Orient(i)),
                Rhs::Var(u) if ord.less(u, &e.lhs) => {
                    for (j, f) in eqs.iter().enumerate() {
                        if j != i && f.lhs == e.lhs {
                            cands.push(Step::Shift(i, j));
                        }
                    }
                }
                Rhs::App(f, _) => {
                    for (j, o) in eqs.iter().enumerate().skip(i + 1) {
                        if o.lhs == e.lhs {
                            if let Rhs::App(g, _) = &o.rhs {
                                if g != f {
                                    clash = true;
                                } else {
                                    cands.push(Step::Decompose(i, j));
                                }
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        if clash {
            return Some((
                BasicOutcome::Contradiction(ContradictionRule::Clash),
                steps + 1,
            ));
        }
        if cands.is_empty() {
            break;
        }
        steps += 1;
        if steps > max_steps {
            return None;
        }
        match cands.swap_remove(choose(cands.len())) {
            Step::DropTrivial(i) => {
                eqs.remove(i);
            }
            Step::Orient(i) => {
                let e = &mut eqs[i];
                let Rhs::Var(u) = e.rhs.clone() else {
                    unreachable!()
                };
                e.rhs = Rhs::Var(std::mem::replace(&mut e.lhs, u));
            }
            Step::Shift(i, j) => {
                let Rhs::Var(u) = eqs[i].rhs.clone() else {
                    unreachable!()
                };
                eqs[j].lhs = u;
            }
            Step::Decompose(i, j) => {
                let Rhs::App(_, ys) = eqs[i].rhs.clone() else {
                    unreachable!()
                };
                let Rhs::App(_, zs) = eqs.remove(j).rhs else {
                    unreachable!()
                };
                eqs.extend(ys.into_iter().zip(zs).map(|(y, z)| Equation::var(y, z)));
            }
            _ => unreachable!(),
        }
    }
    let solved_eqs = BasicFormula {
        eqs,
        fins: Vec::new(),
    };
    let mut fins = b.fins.clone();
    loop {
        let mut cands = Vec::new();
        let mut stop = None;
        for (k, v) in fins.iter().enumerate() {
            if solved_eqs.is_properly_reachable(v) {
                stop = Some(Step::FinCycle);
            } else if analysis.no_finite.contains(&v.sort()) {
                stop = Some(Step::FinNoFinite);
            }
            if fins[..k].contains(v) {
                cands.push(Step::DedupeFin(k));
            }
            match solved_eqs.eq_for(v).map(|e| &e.rhs) {
                Some(Rhs::Var(u)) => cands.push(Step::FinVar(k, u.clone())),
                Some(Rhs::App(_, ys)) => cands.push(Step::FinApp(k, ys.clone())),
                None if analysis.no_infinite.contains(&v.sort()) => cands.push(Step::FinDrop(k)),
                None => {}
            }
        }
        match stop {
            Some(Step::FinCycle) => {
                return Some((
                    BasicOutcome::Contradiction(ContradictionRule::FinCycle),
                    steps + 1,
                ))
            }
            Some(_) => {
                return Some((
                    BasicOutcome::Contradiction(ContradictionRule::FinWithoutFiniteTrees),
                    steps + 1,
                ))
            }
            None => {}
        }
        if cands.is_empty() {
            break;
        }
        steps += 1;
        if steps > max_steps {
            return None;
        }
        match cands.swap_remove(choose(cands.len())) {
            Step::DedupeFin(k) | Step::FinDrop(k) => {
                fins.remove(k);
            }
            Step::FinVar(k, u) => fins[k] = u,
            Step::FinApp(k, ys) => {
                fins.remove(k);
                fins.extend(ys);
            }
            _ => unreachable!(),
        }
    }
    Some((
        BasicOutcome::Solved(BasicFormula {
            eqs: solved_eqs.eqs,
            fins,
        }),
        steps,
    ))
}

/// A representation of a solved basic formula that does not depend on the
/// order in which rules were applied: every class of variables joined by
/// variable equations is represented by its least member, equations and
/// `fin` atoms are rewritten onto representatives, and the atoms are sorted.
pub fn canonical_solved_key(
    order: &[Var],
    b: &BasicFormula,
) -> (Vec<(Var, Var)>, Vec<Equation>, Vec<Var>) {
    let mut ord = VarOrder::new(order);
    ord.extend_with(b);
    let mut parent: HashMap<Var, Var> = HashMap::new();
    fn find(parent: &HashMap<Var, Var>, v: &Var) -> Var {
        let mut cur = v.clone();
        while let Some(p) = parent.get(&cur) {
            cur = p.clone();
        }
        cur
    }
    for e in &b.eqs {
        if let Rhs::Var(u) = &e.rhs {
            let (a, c) = (find(&parent, &e.lhs), find(&parent, u));
            if a != c {
                let (small, big) = if ord.less(&a, &c) { (a, c) } else { (c, a) };
                parent.insert(big, small);
            }
        }
    }
    let mut aliases: Vec<(Var, Var)> = b
        .vars()
        .into_iter()
        .filter_map(|v| {
            let r = find(&parent, &v);
            (r != v).then_some((v, r))
        })
        .collect();
    aliases.sort();
    let mut apps: Vec<Equation> = b
        .eqs
        .iter()
        .filter_map(|e| match &e.rhs {
            Rhs::App(g, ys) => Some(Equation::app(
                find(&parent, &e.lhs),
                *g,
                ys.iter().map(|y| find(&parent, y)).collect(),
            )),
            Rhs::Var(_) => None,
        })
        .collect();
    apps.sort();
    apps.dedup();
    let mut fins: Vec<Var> = b.fins.iter().map(|v| find(&parent, v)).collect();
    fins.sort();
    fins.dedup();
    (aliases, apps, fins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::example_signature;

    struct Fx {
        sig: Signature,
        an: SortAnalysis,
    }

    fn fx() -> Fx {
        let sig = example_signature();
        let an = SortAnalysis::compute(&sig).unwrap();
        Fx { sig, an }
    }

    impl Fx {
        fn v(&self, name: &str, sort: &str) -> Var {
            Var::new(name, self.sig.sort(sort).unwrap())
        }
        fn g(&self, name: &str) -> GenId {
            self.sig.generator_by_name(name).unwrap()
        }
    }

    #[test]
    fn orients_by_nesting() {
        let f = fx();
        let (x, y) = (f.v("x", "nat"), f.v("y", "nat"));
        let b = BasicFormula {
            eqs: vec![Equation::var(y.clone(), x.clone())],
            fins: vec![],
        };
        let out = solve_basic(&[y.clone(), x.clone()], &b, &f.an)
            .solved()
            .unwrap();
        assert_eq!(out.eqs, vec![Equation::var(x, y)]);
    }

    #[test]
    fn clash_is_contradiction() {
        let f = fx();
        let x = f.v("x", "nat");
        let y = f.v("y", "nat");
        let b = BasicFormula {
            eqs: vec![
                Equation::app(x.clone(), f.g("zero"), vec![]),
                Equation::app(x.clone(), f.g("succ"), vec![y.clone()]),
            ],
            fins: vec![],
        };
        assert_eq!(
            solve_basic(&[x, y], &b, &f.an),
            BasicOutcome::Contradiction(ContradictionRule::Clash)
        );
    }

    #[test]
    fn fin_on_cycle_is_contradiction() {
        let f = fx();
        let x = f.v("x", "nat");
        let b = BasicFormula {
            eqs: vec![Equation::app(x.clone(), f.g("succ"), vec![x.clone()])],
            fins: vec![x.clone()],
        };
        assert_eq!(
            solve_basic(&[x], &b, &f.an),
            BasicOutcome::Contradiction(ContradictionRule::FinCycle)
        );
    }

    #[test]
    fn fin_on_infinite_only_sort() {
        let f = fx();
        let x = f.v("x", "inftree");
        let b = BasicFormula {
            eqs: vec![],
            fins: vec![x.clone()],
        };
        assert_eq!(
            solve_basic(&[x], &b, &f.an),
            BasicOutcome::Contradiction(ContradictionRule::FinWithoutFiniteTrees)
        );
    }

    #[test]
    fn fin_pushed_through_application() {
        let f = fx();
        let (x, y, z) = (f.v("x", "list"), f.v("y", "nat"), f.v("z", "list"));
        let b = BasicFormula {
            eqs: vec![Equation::app(
                x.clone(),
                f.g("cons"),
                vec![y.clone(), z.clone()],
            )],
            fins: vec![x.clone()],
        };
        let out = solve_basic(&[x.clone(), y.clone(), z.clone()], &b, &f.an)
            .solved()
            .unwrap();
        assert_eq!(out.fins, vec![y.clone(), z.clone()]);
        assert!(is_solved_basic(&[x, y, z], &out, &f.an));
    }

    #[test]
    fn fin_dropped_on_finite_only_sort() {
        let f = fx();
        let x = f.v("x", "bool");
        let b = BasicFormula {
            eqs: vec![],
            fins: vec![x.clone()],
        };
        assert!(solve_basic(&[x], &b, &f.an).solved().unwrap().is_empty());
    }

    #[test]
    fn decomposes_and_shifts() {
        let f = fx();
        let (x, a, b_, c) = (
            f.v("x", "nat"),
            f.v("a", "nat"),
            f.v("b", "nat"),
            f.v("c", "nat"),
        );
        let order = [x.clone(), a.clone(), b_.clone(), c.clone()];
        let b = BasicFormula {
            eqs: vec![
                Equation::var(x.clone(), a.clone()),
                Equation::app(x.clone(), f.g("succ"), vec![b_.clone()]),
                Equation::app(a.clone(), f.g("succ"), vec![c.clone()]),
            ],
            fins: vec![],
        };
        let out = solve_basic(&order, &b, &f.an).solved().unwrap();
        assert!(is_solved_basic(&order, &out, &f.an));
        assert!(out.eqs.contains(&Equation::var(c.clone(), b_.clone())));
    }

    #[test]
    fn reachability() {
        let f = fx();
        let (x, y, z) = (f.v("x", "nat"), f.v("y", "nat"), f.v("z", "nat"));
        let b = BasicFormula {
            eqs: vec![
                Equation::app(x.clone(), f.g("succ"), vec![y.clone()]),
                Equation::app(y.clone(), f.g("succ"), vec![x.clone()]),
            ],
            fins: vec![z.clone()],
        };
        assert!(b.is_properly_reachable(&x));
        assert!(!b.is_properly_reachable(&z));
        let r = b.reachable_from([&z]);
        assert_eq!(r.len(), 1);
    }
}
