//! Acceptance suite: runs criteria 1 to 9 and prints one PASS/FAIL line per
//! criterion. Exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::Rng;
use treesolve::bench::bench;
use treesolve::{Bucket, RunOptions};
use treetheory::basic::{canonical_solved_key, solve_basic, solve_basic_scheduled, BasicOutcome};
use treetheory::datatypes::{
    check_declarations, eliminate_selectors_default, eliminate_selectors_standard, embed_in_trees,
    DefaultValueTable,
};
use treetheory::formula::{term_to_sexpr, to_sexpr};
use treetheory::instantiate::Condition;
use treetheory::oracle::random::{
    random_basic, random_datatypes, random_finite_signature, random_formula_with,
    random_selector_formula, random_signature, rng_from_seed,
};
use treetheory::oracle::{
    enumerate_domain, eval_closed_finite, eval_outcome, extract_model, satisfiable_standard,
    Evaluator, FormulaProfile, RationalTree, Valuation,
};
use treetheory::solver::check_solved;
use treetheory::{
    compute_finite_sets, compute_zero_sets, example_signature, solve, Formula, Signature,
    SimplifiedFormula, SolveOutcome, Solver, SolverConfig, SortAnalysis, SortId, Term, Var,
};

type Criterion = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("sort analysis of the example signature", sort_analysis),
        ("list case split is valid", list_cases),
        ("models of the infinite-t formula", infinite_t_models),
        ("oracle equivalence", oracle_equivalence),
        ("outputs are fully simplified", well_formed_outputs),
        ("witnesses for simplified outputs", witnesses),
        ("basic solver confluence and termination", confluence),
        ("frontend equisatisfiability", frontend),
        ("benchmark harness", benchmark),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({ms:.1} ms)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} ({ms:.1} ms)", i + 1)
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let e = start.elapsed();
    ensure(e < limit, || format!("took {e:?}, limit {limit:?}"))
}

struct Example {
    sig: Signature,
    an: SortAnalysis,
}

impl Example {
    fn new() -> Self {
        let sig = example_signature();
        let an = SortAnalysis::compute(&sig).unwrap();
        Example { sig, an }
    }

    fn sort(&self, name: &str) -> SortId {
        self.sig.sort(name).unwrap()
    }

    fn gen(&self, name: &str, args: Vec<Term>) -> Term {
        Term::App(self.sig.generator_by_name(name).unwrap(), args)
    }

    fn names(&self, set: &BTreeSet<SortId>) -> BTreeSet<String> {
        set.iter()
            .map(|s| self.sig.sort_name(*s).to_string())
            .collect()
    }

    fn terms(&self, ts: &[Term]) -> BTreeSet<String> {
        ts.iter().map(|t| term_to_sexpr(t, &self.sig)).collect()
    }

    /// ¬(∃x:list. ¬(x = nil) ∧ ¬(∃y,z. x = cons(y, z)))
    fn list_formula(&self) -> Formula {
        let x = Var::new("x", self.sort("list"));
        let y = Var::new("y", self.sort("nat"));
        let z = Var::new("z", self.sort("list"));
        Formula::not(Formula::exists(
            vec![x.clone()],
            Formula::and(vec![
                Formula::not(Formula::eq(Term::var(&x), self.gen("nil", vec![]))),
                Formula::not(Formula::exists(
                    vec![y.clone(), z.clone()],
                    Formula::eq(
                        Term::var(&x),
                        self.gen("cons", vec![Term::var(&y), Term::var(&z)]),
                    ),
                )),
            ]),
        ))
    }

    /// ¬(∃x:t. ¬fin(x) ∧ ¬(x = y) ∧ ¬(x = z)) with free y, z.
    fn infinite_t_formula(&self) -> (Formula, Vec<Var>) {
        let t = self.sort("t");
        let (x, y, z) = (Var::new("x", t), Var::new("y", t), Var::new("z", t));
        let f = Formula::not(Formula::exists(
            vec![x.clone()],
            Formula::and(vec![
                Formula::not(Formula::fin(Term::var(&x))),
                Formula::not(Formula::eq(Term::var(&x), Term::var(&y))),
                Formula::not(Formula::eq(Term::var(&x), Term::var(&z))),
            ]),
        ));
        (f, vec![y, z])
    }
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn sort_analysis() -> Result<String, String> {
    let sig = example_signature();
    let start = Instant::now();
    let zero = compute_zero_sets(&sig);
    let an = compute_finite_sets(&sig);
    let elapsed = start.elapsed();
    let f = Example {
        sig: sig.clone(),
        an: an.clone(),
    };
    let checks: Vec<(&str, BTreeSet<String>, BTreeSet<String>)> = vec![
        (
            "no infinite trees",
            f.names(&zero.no_infinite),
            set(&["bool"]),
        ),
        (
            "no finite trees",
            f.names(&zero.no_finite),
            set(&["inftree"]),
        ),
        (
            "finitely many finite",
            f.names(&an.finitely_many_finite),
            set(&["inftree", "bool", "d"]),
        ),
        ("one infinite", f.names(&an.unique_infinite), set(&["nat"])),
        (
            "finitely many infinite",
            f.names(&an.finitely_many_infinite),
            set(&["bool", "nat", "t"]),
        ),
        (
            "finite trees of d",
            f.terms(an.fin_terms(f.sort("d"))),
            set(&["(c1 true)", "(c1 false)"]),
        ),
        (
            "equations of the nat tree",
            an.unique_infinite_eqs[&f.sort("nat")]
                .iter()
                .map(|e| e.to_sexpr(&sig))
                .collect(),
            set(&["(= $u_nat (succ $u_nat))"]),
        ),
        (
            "infinite trees of t",
            f.terms(an.infin_terms(f.sort("t"))),
            set(&["(g2 false $u_nat)", "(g2 true $u_nat)"]),
        ),
    ];
    for (what, got, want) in checks {
        ensure(got == want, || {
            format!("{what}: got {got:?}, expected {want:?}")
        })?;
    }
    ensure(elapsed < Duration::from_millis(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("all 8 sets exact in {elapsed:?}"))
}

fn list_cases() -> Result<String, String> {
    let f = Example::new();
    let phi = f.list_formula();
    let start = Instant::now();
    let config = SolverConfig {
        record_trace: true,
        ..Default::default()
    };
    let mut solver = Solver::new(&f.sig, &f.an, config);
    let out = solver.solve(&phi, &[]).map_err(|e| e.to_string())?;
    within(start, Duration::from_millis(100))?;
    ensure(out == SolveOutcome::True, || format!("result {:?}", out))?;
    ensure(solver.trace.len() == 1, || {
        format!("{} instantiations", solver.trace.len())
    })?;
    let inst = &solver.trace[0];
    ensure(
        inst.target.sort() == f.sort("list") && inst.condition == Condition::Generator,
        || {
            format!(
                "instantiated {} by condition {}",
                f.sig.sort_name(inst.target.sort()),
                inst.condition.number()
            )
        },
    )?;
    let (nil, cons) = (
        f.sig.generator_by_name("nil").unwrap(),
        f.sig.generator_by_name("cons").unwrap(),
    );
    let shapes: Vec<String> = inst
        .cases
        .iter()
        .map(|c| {
            let sorts: Vec<&str> = c.fresh.iter().map(|v| f.sig.sort_name(v.sort())).collect();
            format!("{} fresh {:?}", c.psi.to_sexpr(&f.sig), sorts)
        })
        .collect();
    let ok = inst.cases.len() == 2
        && inst.cases[0].fresh.is_empty()
        && inst.cases[0].psi.fins.is_empty()
        && inst.cases[0].psi.eqs.len() == 1
        && inst.cases[0].psi.eqs[0].rhs == treetheory::Rhs::App(nil, vec![])
        && inst.cases[1].psi.eqs.len() == 1
        && inst.cases[1].psi.eqs[0].rhs == treetheory::Rhs::App(cons, inst.cases[1].fresh.clone())
        && inst.cases[1]
            .fresh
            .iter()
            .map(|v| v.sort())
            .collect::<Vec<_>>()
            == [f.sort("nat"), f.sort("list")];
    ensure(ok, || format!("cases {shapes:?}"))?;
    Ok(format!("true; cases {shapes:?}"))
}

/// The four g1 trees and the two infinite g2 trees.
fn t_candidates(f: &Example) -> Vec<RationalTree> {
    let g1 = f.sig.generator_by_name("g1").unwrap();
    let g2 = f.sig.generator_by_name("g2").unwrap();
    let b: Vec<RationalTree> = ["false", "true"]
        .iter()
        .map(|n| RationalTree::leaf(f.sig.generator_by_name(n).unwrap()))
        .collect();
    let succ = f.sig.generator_by_name("succ").unwrap();
    let omega = RationalTree::from_graph(
        &[treetheory::oracle::Node {
            gen: succ,
            children: vec![0],
        }],
        0,
    );
    let mut out = Vec::new();
    for x in &b {
        for y in &b {
            out.push(RationalTree::apply(g1, &[x.clone(), y.clone()]));
        }
    }
    for x in &b {
        out.push(RationalTree::apply(g2, &[x.clone(), omega.clone()]));
    }
    out
}

fn infinite_t_models() -> Result<String, String> {
    let f = Example::new();
    let (phi, free) = f.infinite_t_formula();
    let start = Instant::now();
    let out = solve(&phi, &f.sig, &f.an).map_err(|e| e.to_string())?;
    let dom = t_candidates(&f);
    let mut models = BTreeSet::new();
    for a in &dom {
        for b in &dom {
            let val: Valuation = [(free[0].clone(), a.clone()), (free[1].clone(), b.clone())]
                .into_iter()
                .collect();
            if eval_outcome(&out, &val).map_err(|e| e.to_string())? {
                models.insert((a.render(&f.sig), b.render(&f.sig)));
            }
        }
    }
    within(start, Duration::from_secs(1))?;
    let (p, q) = (
        "(g2 false #0=(succ #0#))".to_string(),
        "(g2 true #0=(succ #0#))".to_string(),
    );
    let want: BTreeSet<(String, String)> = [(p.clone(), q.clone()), (q, p)].into_iter().collect();
    ensure(models == want, || format!("models {models:?}"))?;
    Ok(format!(
        "{} of {} valuations are models, as expected",
        models.len(),
        dom.len() * dom.len()
    ))
}

fn all_valuations(vars: &[Var], domains: &BTreeMap<SortId, Vec<RationalTree>>) -> Vec<Valuation> {
    let mut out = vec![Valuation::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|val| {
                domains[&v.sort()].iter().map(move |t| {
                    let mut w = val.clone();
                    w.insert(v.clone(), t.clone());
                    w
                })
            })
            .collect();
    }
    out
}

struct Case {
    sig: Signature,
    an: SortAnalysis,
    formula: Formula,
    free: Vec<Var>,
}

fn closed_cases() -> Vec<Case> {
    let mut rng = rng_from_seed(101);
    (0..500)
        .map(|_| {
            let sig = random_finite_signature(&mut rng);
            let an = SortAnalysis::compute(&sig).unwrap();
            let p = FormulaProfile {
                quantifier_depth: 3,
                max_atoms: 8,
                ..Default::default()
            };
            let formula = random_formula_with(&mut rng, &sig, &p);
            Case {
                sig,
                an,
                formula,
                free: Vec::new(),
            }
        })
        .collect()
}

fn open_cases() -> Vec<Case> {
    let mut rng = rng_from_seed(102);
    (0..200)
        .map(|_| {
            let sig = random_finite_signature(&mut rng);
            let an = SortAnalysis::compute(&sig).unwrap();
            let sorts: Vec<SortId> = sig.sorts().collect();
            let n = rng.gen_range(1..=2);
            let free: Vec<Var> = (0..n)
                .map(|i| Var::new(format!("x{i}"), sorts[rng.gen_range(0..sorts.len())]))
                .collect();
            let p = FormulaProfile {
                quantifier_depth: 3,
                max_atoms: 8,
                free: free.clone(),
                ..Default::default()
            };
            let formula = random_formula_with(&mut rng, &sig, &p);
            Case {
                sig,
                an,
                formula,
                free,
            }
        })
        .collect()
}

fn domains(c: &Case) -> BTreeMap<SortId, Vec<RationalTree>> {
    c.sig
        .sorts()
        .map(|s| (s, enumerate_domain(s, &c.sig, &c.an).unwrap()))
        .collect()
}

fn oracle_equivalence() -> Result<String, String> {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for c in closed_cases() {
        let out = solve(&c.formula, &c.sig, &c.an).map_err(|e| e.to_string())?;
        let expected = eval_closed_finite(&c.formula, &c.sig, &c.an).map_err(|e| e.to_string())?;
        let got = match out {
            SolveOutcome::True => Some(true),
            SolveOutcome::False => Some(false),
            SolveOutcome::Disjunction(_) => None,
        };
        if got != Some(expected) {
            mismatches.push(to_sexpr(&c.formula, &c.sig));
        }
    }
    let mut valuations = 0;
    for c in open_cases() {
        let out = solve(&c.formula, &c.sig, &c.an).map_err(|e| e.to_string())?;
        for mut val in all_valuations(&c.free, &domains(&c)) {
            valuations += 1;
            let expected = Evaluator::new(&c.sig, &c.an)
                .eval(&c.formula, &mut val)
                .map_err(|e| e.to_string())?;
            if eval_outcome(&out, &val).map_err(|e| e.to_string())? != expected {
                mismatches.push(to_sexpr(&c.formula, &c.sig));
                break;
            }
        }
    }
    within(start, Duration::from_secs(300))?;
    ensure(mismatches.is_empty(), || {
        format!("{} mismatches, first {}", mismatches.len(), mismatches[0])
    })?;
    Ok(format!(
        "500 closed and 200 open formulae agree ({valuations} valuations), 0 mismatches"
    ))
}

fn disjuncts(out: &SolveOutcome) -> &[SimplifiedFormula] {
    match out {
        SolveOutcome::Disjunction(ds) => ds,
        _ => &[],
    }
}

fn well_formed_outputs() -> Result<String, String> {
    let mut outputs: Vec<(SolveOutcome, SortAnalysis, Signature)> = Vec::new();
    let f = Example::new();
    outputs.push((
        solve(&f.list_formula(), &f.sig, &f.an).map_err(|e| e.to_string())?,
        f.an.clone(),
        f.sig.clone(),
    ));
    let (phi2, _) = f.infinite_t_formula();
    outputs.push((
        solve(&phi2, &f.sig, &f.an).map_err(|e| e.to_string())?,
        f.an.clone(),
        f.sig.clone(),
    ));
    for c in closed_cases().into_iter().chain(open_cases()) {
        let out = solve(&c.formula, &c.sig, &c.an).map_err(|e| e.to_string())?;
        outputs.push((out, c.an, c.sig));
    }
    let mut checked = 0;
    let mut violations = Vec::new();
    for (out, an, sig) in &outputs {
        for d in disjuncts(out) {
            checked += 1;
            if let Err(v) = check_solved(&d.free, &d.normal, an) {
                violations.push(format!("{v}: {}", to_sexpr(&d.to_formula(), sig)));
            }
        }
    }
    ensure(violations.is_empty(), || {
        format!("{} violations, first {}", violations.len(), violations[0])
    })?;
    Ok(format!(
        "{checked} disjuncts from {} outputs, 0 violations",
        outputs.len()
    ))
}

fn witnesses() -> Result<String, String> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for c in open_cases() {
        let out = solve(&c.formula, &c.sig, &c.an).map_err(|e| e.to_string())?;
        let doms = domains(&c);
        for d in disjuncts(&out) {
            checked += 1;
            let g = d.to_formula();
            let shown = || to_sexpr(&g, &c.sig);
            let holds = |val: &Valuation| Evaluator::new(&c.sig, &c.an).eval(&g, &mut val.clone());
            match extract_model(d, &c.sig, &c.an) {
                Ok(m) if holds(&m) == Ok(true) => {}
                Ok(_) => failures.push(format!("model does not satisfy {}", shown())),
                Err(e) => failures.push(format!("{e}: {}", shown())),
            }
            let neg = solve(&Formula::not(g.clone()), &c.sig, &c.an).map_err(|e| e.to_string())?;
            if !neg.is_satisfiable() {
                failures.push(format!("negation unsatisfiable: {}", shown()));
            }
            let falsified = all_valuations(&d.free, &doms)
                .iter()
                .any(|v| holds(v) == Ok(false));
            if !falsified {
                failures.push(format!("no valuation falsifies {}", shown()));
            }
        }
    }
    ensure(checked > 0, || "no open disjuncts to check".into())?;
    ensure(failures.is_empty(), || {
        format!("{} failures, first {}", failures.len(), failures[0])
    })?;
    Ok(format!(
        "{checked} disjuncts have models and satisfiable negations"
    ))
}

fn confluence() -> Result<String, String> {
    let mut rng = rng_from_seed(103);
    let mut divergences = Vec::new();
    let mut runs = 0;
    for i in 0..100 {
        let sig = if i % 2 == 0 {
            example_signature()
        } else {
            random_signature(&mut rng)
        };
        let an = SortAnalysis::compute(&sig).unwrap();
        let atoms = rng.gen_range(3..=12);
        let (order, b) = random_basic(&mut rng, &sig, &an, atoms);
        let reference = solve_basic(&order, &b, &an);
        let key = |o: &BasicOutcome| match o {
            BasicOutcome::Solved(s) => Some(canonical_solved_key(&order, s)),
            BasicOutcome::Contradiction(_) => None,
        };
        let want = key(&reference);
        for _ in 0..500 {
            runs += 1;
            match solve_basic_scheduled(&order, &b, &an, &mut |n| rng.gen_range(0..n), 10_000) {
                None => divergences.push(format!("no termination on {}", b.to_sexpr(&sig))),
                Some((o, _)) if key(&o) != want => {
                    divergences.push(format!("different result on {}", b.to_sexpr(&sig)))
                }
                Some(_) => {}
            }
        }
    }
    ensure(divergences.is_empty(), || {
        format!(
            "{} divergences, first {}",
            divergences.len(),
            divergences[0]
        )
    })?;
    Ok(format!(
        "{runs} scheduled runs over 100 formulae, 0 divergences"
    ))
}

fn frontend() -> Result<String, String> {
    let mut rng = rng_from_seed(104);
    let mut mismatches = Vec::new();
    let mut sat = 0;
    for _ in 0..100 {
        let d = check_declarations(&random_datatypes(&mut rng)).map_err(|e| e.to_string())?;
        let an = SortAnalysis::compute(&d.sig).map_err(|e| e.to_string())?;
        let sorts: Vec<SortId> = d.sig.sorts().collect();
        let free: Vec<Var> = (0..rng.gen_range(1..=2))
            .map(|i| Var::new(format!("x{i}"), sorts[rng.gen_range(0..sorts.len())]))
            .collect();
        let atoms = rng.gen_range(1..=3);
        let f = random_selector_formula(&mut rng, &d, &free, atoms);
        let expected = satisfiable_standard(&f, &free, &d.sig, &an).map_err(|e| e.to_string())?;
        sat += expected as usize;
        let g = embed_in_trees(
            &eliminate_selectors_standard(&f, &d).map_err(|e| e.to_string())?,
            &d,
        );
        let got = solve(&g, &d.sig, &an)
            .map_err(|e| e.to_string())?
            .is_satisfiable();
        if got != expected || g.has_selector() {
            mismatches.push(format!("standard: {}", to_sexpr(&f, &d.sig)));
        }
    }
    let mut default_sat = 0;
    for _ in 0..100 {
        let d = check_declarations(&random_datatypes(&mut rng)).map_err(|e| e.to_string())?;
        let an = SortAnalysis::compute(&d.sig).map_err(|e| e.to_string())?;
        let mut table = DefaultValueTable::new();
        table.fill_missing(&d, &an);
        let sorts: Vec<SortId> = d.sig.sorts().collect();
        let free: Vec<Var> = (0..rng.gen_range(1..=2))
            .map(|i| Var::new(format!("x{i}"), sorts[rng.gen_range(0..sorts.len())]))
            .collect();
        let atoms = rng.gen_range(1..=3);
        let f = random_selector_formula(&mut rng, &d, &free, atoms);
        let doms: BTreeMap<SortId, Vec<RationalTree>> = sorts
            .iter()
            .map(|s| (*s, enumerate_domain(*s, &d.sig, &an).unwrap()))
            .collect();
        let mut expected = false;
        for mut val in all_valuations(&free, &doms) {
            expected |= Evaluator::new(&d.sig, &an)
                .with_selectors(&table)
                .eval(&f, &mut val)
                .map_err(|e| e.to_string())?;
        }
        default_sat += expected as usize;
        let g = embed_in_trees(
            &eliminate_selectors_default(&f, &d, &table).map_err(|e| e.to_string())?,
            &d,
        );
        let got = solve(&g, &d.sig, &an)
            .map_err(|e| e.to_string())?
            .is_satisfiable();
        if got != expected || g.has_selector() {
            mismatches.push(format!("defaults: {}", to_sexpr(&f, &d.sig)));
        }
    }
    ensure(mismatches.is_empty(), || {
        format!("{} mismatches, first {}", mismatches.len(), mismatches[0])
    })?;
    Ok(format!(
        "standard {sat}/100 satisfiable, defaults {default_sat}/100 satisfiable, 0 mismatches"
    ))
}

fn benchmark() -> Result<String, String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let summary =
        bench(&dir, &RunOptions::default()).map_err(|e| format!("{}: {e}", dir.display()))?;
    ensure(summary.total >= 50, || {
        format!("only {} problems", summary.total)
    })?;
    let frac = summary.completed_fraction();
    ensure(frac >= 0.9, || format!("{:.1}% completed", frac * 100.0))?;
    let mut per_condition = [0u64; 4];
    for r in &summary.rows {
        for (k, n) in r.instantiations.iter().enumerate() {
            per_condition[k] += n;
        }
    }
    ensure(per_condition.iter().all(|n| *n > 0), || {
        format!("instantiations per condition {per_condition:?}")
    })?;
    let labels: Vec<&str> = summary.histogram.iter().map(|(b, _)| b.label()).collect();
    ensure(labels == Bucket::ALL.map(Bucket::label), || {
        format!("buckets {labels:?}")
    })?;
    let counts: Vec<String> = summary
        .histogram
        .iter()
        .map(|(b, n)| format!("{} {n}", b.label()))
        .collect();
    Ok(format!(
        "{} problems, {:.1}% within 10 s, instantiations per condition {per_condition:?}; {}",
        summary.total,
        frac * 100.0,
        counts.join(", ")
    ))
}
