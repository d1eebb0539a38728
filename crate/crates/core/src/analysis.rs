//! Static analysis of which sorts have finite or infinite trees, and of the
//! sorts with only finitely many of them.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::basic::{Equation, Rhs};
use crate::formula::{term_to_sexpr, Term, Var};
use crate::signature::{GenId, Signature, SignatureError, SortId};

pub type SortSet = BTreeSet<SortId>;

/// Sorts without finite trees (`no_finite`) and without infinite trees
/// (`no_infinite`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroSets {
    pub no_finite: SortSet,
    pub no_infinite: SortSet,
}

pub fn compute_zero_sets(sig: &Signature) -> ZeroSets {
    let mut no_infinite = SortSet::new();
    let mut no_finite: SortSet = sig.sorts().collect();
    loop {
        let mut changed = false;
        for s in sig.sorts() {
            if !no_infinite.contains(&s)
                && sig.generators_of(s).iter().all(|g| {
                    sig.generator(*g)
                        .args
                        .iter()
                        .all(|a| no_infinite.contains(a))
                })
            {
                no_infinite.insert(s);
                changed = true;
            }
            if no_finite.contains(&s)
                && sig.generators_of(s).iter().any(|g| {
                    sig.generator(*g)
                        .args
                        .iter()
                        .all(|a| !no_finite.contains(a))
                })
            {
                no_finite.remove(&s);
                changed = true;
            }
        }
        if !changed {
            return ZeroSets {
                no_finite,
                no_infinite,
            };
        }
    }
}

/// Everything the solver needs to know about the sorts of a signature.
///
/// `fin_inhabitants[s]` lists the finite trees of a sort in `finitely_many_finite`;
/// `infin_inhabitants[s]` lists the infinite trees of a sort in
/// `finitely_many_infinite`, written with the reserved variables of
/// `unique_infinite_vars` whose meaning is fixed by `unique_infinite_eqs`.
#[derive(Clone, Debug)]
pub struct SortAnalysis {
    pub no_finite: SortSet,
    pub no_infinite: SortSet,
    pub finitely_many_finite: SortSet,
    pub unique_infinite: SortSet,
    pub finitely_many_infinite: SortSet,
    pub fin_inhabitants: BTreeMap<SortId, Vec<Term>>,
    pub infin_inhabitants: BTreeMap<SortId, Vec<Term>>,
    pub unique_infinite_eqs: BTreeMap<SortId, Vec<Equation>>,
    pub unique_infinite_vars: BTreeMap<SortId, Var>,
}

pub fn unique_infinite_var(sig: &Signature, s: SortId) -> Var {
    Var::new(format!("$u_{}", sig.sort_name(s)), s)
}

impl SortAnalysis {
    /// Validates the signature and runs both fixed-point computations.
    pub fn compute(sig: &Signature) -> Result<SortAnalysis, SignatureError> {
        sig.validate()?;
        Ok(compute_finite_sets(sig))
    }

    pub fn has_finite(&self, s: SortId) -> bool {
        !self.no_finite.contains(&s)
    }

    pub fn has_infinite(&self, s: SortId) -> bool {
        !self.no_infinite.contains(&s)
    }

    pub fn is_finite_domain(&self, s: SortId) -> bool {
        self.finitely_many_finite.contains(&s) && self.finitely_many_infinite.contains(&s)
    }

    pub fn fin_terms(&self, s: SortId) -> &[Term] {
        self.fin_inhabitants
            .get(&s)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn infin_terms(&self, s: SortId) -> &[Term] {
        self.infin_inhabitants
            .get(&s)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn is_unique_infinite_var(&self, v: &Var) -> bool {
        self.unique_infinite_vars.get(&v.sort()) == Some(v)
    }

    /// Equations defining every reserved variable occurring in `t`.
    pub fn equations_for(&self, t: &Term) -> Vec<Equation> {
        let mut vars = Vec::new();
        t.vars_into(&mut vars);
        let mut out: Vec<Equation> = Vec::new();
        for v in vars {
            if let Some(eqs) = self.unique_infinite_eqs.get(&v.sort()) {
                for e in eqs {
                    if !out.iter().any(|o| o.lhs == e.lhs) {
                        out.push(e.clone());
                    }
                }
            }
        }
        out
    }

    pub fn to_report(&self, sig: &Signature) -> AnalysisReport {
        let names = |set: &SortSet| set.iter().map(|s| sig.sort_name(*s).to_string()).collect();
        let terms = |m: &BTreeMap<SortId, Vec<Term>>| {
            m.iter()
                .map(|(s, ts)| {
                    (
                        sig.sort_name(*s).to_string(),
                        ts.iter().map(|t| term_to_sexpr(t, sig)).collect(),
                    )
                })
                .collect()
        };
        AnalysisReport {
            no_finite: names(&self.no_finite),
            no_infinite: names(&self.no_infinite),
            finitely_many_finite: names(&self.finitely_many_finite),
            unique_infinite: names(&self.unique_infinite),
            finitely_many_infinite: names(&self.finitely_many_infinite),
            fin_inhabitants: terms(&self.fin_inhabitants),
            infin_inhabitants: terms(&self.infin_inhabitants),
            unique_infinite_eqs: self
                .unique_infinite_eqs
                .iter()
                .map(|(s, eqs)| {
                    (
                        sig.sort_name(*s).to_string(),
                        eqs.iter().map(|e| e.to_sexpr(sig)).collect(),
                    )
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub no_finite: Vec<String>,
    pub no_infinite: Vec<String>,
    pub finitely_many_finite: Vec<String>,
    pub unique_infinite: Vec<String>,
    pub finitely_many_infinite: Vec<String>,
    pub fin_inhabitants: BTreeMap<String, Vec<String>>,
    pub infin_inhabitants: BTreeMap<String, Vec<String>>,
    pub unique_infinite_eqs: BTreeMap<String, Vec<String>>,
}

fn product(choices: &[Vec<Term>]) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for t in c {
                let mut p = prefix.clone();
                p.push(t.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Computes the sorts with finitely many finite trees, the sorts with a single
/// infinite tree and the sorts with finitely many infinite trees, together
/// with their inhabitants. Does not check the signature; see
/// [`SortAnalysis::compute`].
pub fn compute_finite_sets(sig: &Signature) -> SortAnalysis {
    let ZeroSets {
        no_finite,
        no_infinite,
    } = compute_zero_sets(sig);
    let gens = |s: SortId| sig.generators_of(s).iter().map(|g| (*g, sig.generator(*g)));

    // Sorts with finitely many finite trees.
    let mut ff: SortSet = no_finite.clone();
    let mut fin: BTreeMap<SortId, Vec<Term>> = BTreeMap::new();
    let mut u_eqs: BTreeMap<SortId, Vec<Equation>> = BTreeMap::new();
    let mut unique: SortSet = sig.sorts().filter(|s| !no_infinite.contains(s)).collect();
    loop {
        let mut changed = false;
        for s in sig.sorts() {
            let finite_gens: Vec<(GenId, _)> = gens(s)
                .filter(|(_, g)| !g.args.iter().any(|a| no_finite.contains(a)))
                .collect();
            if finite_gens
                .iter()
                .all(|(_, g)| g.args.iter().all(|a| ff.contains(a)))
            {
                changed |= ff.insert(s);
                let mut terms = Vec::new();
                for (id, g) in &finite_gens {
                    let choices: Vec<Vec<Term>> = g
                        .args
                        .iter()
                        .map(|a| fin.get(a).cloned().unwrap_or_default())
                        .collect();
                    for args in product(&choices) {
                        terms.push(Term::App(*id, args));
                    }
                }
                if fin.get(&s) != Some(&terms) {
                    fin.insert(s, terms);
                    changed = true;
                }
            }
            if !unique.contains(&s) {
                continue;
            }
            let all = sig.generators_of(s);
            let candidate = all.iter().find(|g| {
                let gen = sig.generator(**g);
                gen.args.len() == 1
                    && unique.contains(&gen.args[0])
                    && all.iter().filter(|h| *h != *g).all(|h| {
                        sig.generator(*h)
                            .args
                            .iter()
                            .all(|a| no_infinite.contains(a))
                    })
            });
            match candidate {
                Some(g) => {
                    let arg = sig.generator(*g).args[0];
                    let mut eqs = vec![Equation {
                        lhs: unique_infinite_var(sig, s),
                        rhs: Rhs::App(*g, vec![unique_infinite_var(sig, arg)]),
                    }];
                    if arg != s {
                        for e in u_eqs.get(&arg).cloned().unwrap_or_default() {
                            if !eqs.iter().any(|o| o.lhs == e.lhs) {
                                eqs.push(e);
                            }
                        }
                    }
                    if u_eqs.get(&s) != Some(&eqs) {
                        u_eqs.insert(s, eqs);
                        changed = true;
                    }
                }
                None => {
                    unique.remove(&s);
                    u_eqs.remove(&s);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    // Sorts outside the set never get an inhabitant list.
    fin.retain(|s, _| ff.contains(s));
    u_eqs.retain(|s, _| unique.contains(s));

    // Sorts with finitely many infinite trees.
    let mut fi: SortSet = no_infinite.union(&unique).copied().collect();
    let mut infin: BTreeMap<SortId, Vec<Term>> = BTreeMap::new();
    for s in &unique {
        infin.insert(*s, vec![Term::Var(unique_infinite_var(sig, *s))]);
    }
    for s in &no_infinite {
        infin.insert(*s, Vec::new());
    }
    loop {
        let mut changed = false;
        for s in sig.sorts() {
            // Members of the seed sets already carry their final inhabitants;
            // recomputing them would keep wrapping generators around the
            // reserved variable forever.
            if no_infinite.contains(&s) || unique.contains(&s) {
                continue;
            }
            let inf_gens: Vec<(GenId, _)> = gens(s)
                .filter(|(_, g)| g.args.iter().any(|a| !no_infinite.contains(a)))
                .collect();
            let ok = inf_gens.iter().all(|(_, g)| {
                (0..g.args.len()).all(|i| {
                    no_infinite.contains(&g.args[i])
                        || (fi.contains(&g.args[i])
                            && (0..g.args.len())
                                .filter(|j| *j != i)
                                .all(|j| ff.contains(&g.args[j]) && fi.contains(&g.args[j])))
                })
            });
            if !ok {
                continue;
            }
            changed |= fi.insert(s);
            let mut terms = Vec::new();
            for (id, g) in &inf_gens {
                // Choice i is (term, is_infinite).
                let choices: Vec<Vec<(Term, bool)>> = g
                    .args
                    .iter()
                    .map(|a| {
                        let mut c: Vec<(Term, bool)> = fin
                            .get(a)
                            .cloned()
                            .unwrap_or_default()
                            .into_iter()
                            .map(|t| (t, false))
                            .collect();
                        c.extend(
                            infin
                                .get(a)
                                .cloned()
                                .unwrap_or_default()
                                .into_iter()
                                .map(|t| (t, true)),
                        );
                        c
                    })
                    .collect();
                let mut combos: Vec<(Vec<Term>, bool)> = vec![(Vec::new(), false)];
                for c in &choices {
                    let mut next = Vec::new();
                    for (prefix, inf) in &combos {
                        for (t, ti) in c {
                            let mut p = prefix.clone();
                            p.push(t.clone());
                            next.push((p, *inf || *ti));
                        }
                    }
                    combos = next;
                }
                terms.extend(
                    combos
                        .into_iter()
                        .filter(|c| c.1)
                        .map(|c| Term::App(*id, c.0)),
                );
            }
            if infin.get(&s) != Some(&terms) {
                infin.insert(s, terms);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    infin.retain(|s, _| fi.contains(s));

    let unique_infinite_vars = unique
        .iter()
        .map(|s| (*s, unique_infinite_var(sig, *s)))
        .collect();
    SortAnalysis {
        no_finite,
        no_infinite,
        finitely_many_finite: ff,
        unique_infinite: unique,
        finitely_many_infinite: fi,
        fin_inhabitants: fin,
        infin_inhabitants: infin,
        unique_infinite_eqs: u_eqs,
        unique_infinite_vars,
    }
}
