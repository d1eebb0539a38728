//! Solver results compared with brute-force evaluation.

use std::collections::BTreeMap;

use rand::Rng;
use treetheory::formula::to_sexpr;
use treetheory::oracle::enumerate::{finite_trees, infinite_trees};
use treetheory::oracle::random::{random_finite_signature, random_formula_with, rng_from_seed};
use treetheory::oracle::{
    eval_closed_finite, eval_outcome, Evaluator, FormulaProfile, RationalTree, Valuation,
};
use treetheory::solver::check_solved;
use treetheory::{
    example_signature, solve, Formula, Signature, SolveOutcome, SortAnalysis, SortId, Var,
};

fn all_valuations(vars: &[Var], domains: &BTreeMap<SortId, Vec<RationalTree>>) -> Vec<Valuation> {
    let mut out = vec![Valuation::new()];
    for v in vars {
        let mut next = Vec::new();
        for val in &out {
            for t in &domains[&v.sort()] {
                let mut w = val.clone();
                w.insert(v.clone(), t.clone());
                next.push(w);
            }
        }
        out = next;
    }
    out
}

fn assert_agrees(
    f: &Formula,
    sig: &Signature,
    an: &SortAnalysis,
    vars: &[Var],
    domains: &BTreeMap<SortId, Vec<RationalTree>>,
) {
    let out = solve(f, sig, an).unwrap();
    if let SolveOutcome::Disjunction(ds) = &out {
        for d in ds {
            if let Err(v) = check_solved(&d.free, &d.normal, an) {
                panic!(
                    "{} gave an unsolved disjunct ({v}): {}",
                    to_sexpr(f, sig),
                    to_sexpr(&d.to_formula(), sig)
                );
            }
        }
    }
    for mut val in all_valuations(vars, domains) {
        let expected = Evaluator::new(sig, an).eval(f, &mut val).unwrap();
        let got = eval_outcome(&out, &val).unwrap();
        if expected != got {
            let shown: Vec<String> = vars
                .iter()
                .map(|v| format!("{}={}", v.name(), val[v].render(sig)))
                .collect();
            panic!(
                "{}\nexpected {expected} under {shown:?}\noutput {}",
                to_sexpr(f, sig),
                to_sexpr(&out.to_formula(), sig)
            );
        }
    }
}

#[test]
fn closed_formulae_on_finite_signatures() {
    let mut rng = rng_from_seed(11);
    for _ in 0..300 {
        let sig = random_finite_signature(&mut rng);
        let an = SortAnalysis::compute(&sig).unwrap();
        let p = FormulaProfile {
            quantifier_depth: 3,
            max_atoms: 8,
            ..Default::default()
        };
        let f = random_formula_with(&mut rng, &sig, &p);
        let out = solve(&f, &sig, &an).unwrap();
        let expected = eval_closed_finite(&f, &sig, &an).unwrap();
        let got = match out {
            SolveOutcome::True => true,
            SolveOutcome::False => false,
            other => panic!("closed formula {} gave {:?}", to_sexpr(&f, &sig), other),
        };
        assert_eq!(got, expected, "{}", to_sexpr(&f, &sig));
    }
}

#[test]
fn open_formulae_on_finite_signatures() {
    let mut rng = rng_from_seed(12);
    for _ in 0..200 {
        let sig = random_finite_signature(&mut rng);
        let an = SortAnalysis::compute(&sig).unwrap();
        let sorts: Vec<SortId> = sig.sorts().collect();
        let n = rng.gen_range(1..=2);
        let free: Vec<Var> = (0..n)
            .map(|i| Var::new(format!("x{i}"), sorts[rng.gen_range(0..sorts.len())]))
            .collect();
        let p = FormulaProfile {
            quantifier_depth: 2,
            max_atoms: 6,
            free: free.clone(),
            ..Default::default()
        };
        let f = random_formula_with(&mut rng, &sig, &p);
        let domains: BTreeMap<SortId, Vec<RationalTree>> = sorts
            .iter()
            .map(|s| {
                (
                    *s,
                    treetheory::oracle::enumerate_domain(*s, &sig, &an).unwrap(),
                )
            })
            .collect();
        assert_agrees(&f, &sig, &an, &free, &domains);
    }
}

/// Quantifier-free formulae over the example signature, with free variables
/// of every sort checked on small finite and rational trees.
#[test]
fn quantifier_free_on_example_signature() {
    let sig = example_signature();
    let an = SortAnalysis::compute(&sig).unwrap();
    let fin = finite_trees(&sig, 3);
    let inf = infinite_trees(&sig, &an, 2);
    let domains: BTreeMap<SortId, Vec<RationalTree>> = sig
        .sorts()
        .map(|s| (s, fin[&s].iter().chain(&inf[&s]).cloned().collect()))
        .collect();
    let mut rng = rng_from_seed(13);
    let sorts: Vec<SortId> = sig.sorts().collect();
    for _ in 0..300 {
        let n = rng.gen_range(1..=2);
        let free: Vec<Var> = (0..n)
            .map(|i| Var::new(format!("x{i}"), sorts[rng.gen_range(0..sorts.len())]))
            .collect();
        let p = FormulaProfile {
            quantifier_depth: 0,
            max_atoms: 5,
            term_depth: 2,
            free: free.clone(),
            ..Default::default()
        };
        let f = random_formula_with(&mut rng, &sig, &p);
        assert_agrees(&f, &sig, &an, &free, &domains);
    }
}

/// Quantifiers over the finite-domain sort, free variables of any sort.
#[test]
fn bool_quantifiers_on_example_signature() {
    let sig = example_signature();
    let an = SortAnalysis::compute(&sig).unwrap();
    let fin = finite_trees(&sig, 3);
    let inf = infinite_trees(&sig, &an, 2);
    let domains: BTreeMap<SortId, Vec<RationalTree>> = sig
        .sorts()
        .map(|s| (s, fin[&s].iter().chain(&inf[&s]).cloned().collect()))
        .collect();
    let bool_sort = sig.sort("bool").unwrap();
    let mut rng = rng_from_seed(14);
    let sorts: Vec<SortId> = sig.sorts().collect();
    for _ in 0..300 {
        let n = rng.gen_range(1..=2);
        let free: Vec<Var> = (0..n)
            .map(|i| Var::new(format!("x{i}"), sorts[rng.gen_range(0..sorts.len())]))
            .collect();
        let p = FormulaProfile {
            quantifier_depth: 2,
            max_atoms: 5,
            term_depth: 2,
            free: free.clone(),
            quantifier_sorts: vec![bool_sort],
            ..Default::default()
        };
        let f = random_formula_with(&mut rng, &sig, &p);
        assert_agrees(&f, &sig, &an, &free, &domains);
    }
}

/// Without an oracle for quantifiers over infinite sorts, a formula and its
/// negation must still get complementary results on every valuation.
fn assert_complementary(
    f: &Formula,
    sig: &Signature,
    an: &SortAnalysis,
    vars: &[Var],
    domains: &BTreeMap<SortId, Vec<RationalTree>>,
) {
    let pos = solve(f, sig, an).unwrap();
    let neg = solve(&Formula::not(f.clone()), sig, an).unwrap();
    for out in [&pos, &neg] {
        if let SolveOutcome::Disjunction(ds) = out {
            for d in ds {
                if let Err(v) = check_solved(&d.free, &d.normal, an) {
                    panic!(
                        "{} gave an unsolved disjunct ({v}): {}",
                        to_sexpr(f, sig),
                        to_sexpr(&d.to_formula(), sig)
                    );
                }
            }
        }
    }
    for val in all_valuations(vars, domains) {
        let a = eval_outcome(&pos, &val).unwrap();
        let b = eval_outcome(&neg, &val).unwrap();
        if a == b {
            let shown: Vec<String> = vars
                .iter()
                .map(|v| format!("{}={}", v.name(), val[v].render(sig)))
                .collect();
            panic!(
                "{}\nboth {a} under {shown:?}\npositive {}\nnegative {}",
                to_sexpr(f, sig),
                to_sexpr(&pos.to_formula(), sig),
                to_sexpr(&neg.to_formula(), sig)
            );
        }
    }
}

fn sample_domains(sig: &Signature, an: &SortAnalysis) -> BTreeMap<SortId, Vec<RationalTree>> {
    let fin = finite_trees(sig, 3);
    let inf = infinite_trees(sig, an, 2);
    sig.sorts()
        .map(|s| (s, fin[&s].iter().chain(&inf[&s]).cloned().collect()))
        .collect()
}

#[test]
fn negation_is_complementary_on_example_signature() {
    let sig = example_signature();
    let an = SortAnalysis::compute(&sig).unwrap();
    let domains = sample_domains(&sig, &an);
    let mut rng = rng_from_seed(15);
    let sorts: Vec<SortId> = sig.sorts().collect();
    for _ in 0..300 {
        let n = rng.gen_range(0..=2);
        let free: Vec<Var> = (0..n)
            .map(|i| Var::new(format!("x{i}"), sorts[rng.gen_range(0..sorts.len())]))
            .collect();
        let p = FormulaProfile {
            quantifier_depth: 2,
            max_atoms: 5,
            free: free.clone(),
            ..Default::default()
        };
        let f = random_formula_with(&mut rng, &sig, &p);
        assert_complementary(&f, &sig, &an, &free, &domains);
    }
}

#[test]
fn negation_is_complementary_on_random_signatures() {
    let mut rng = rng_from_seed(16);
    for _ in 0..300 {
        let sig = treetheory::oracle::random::random_signature(&mut rng);
        let an = SortAnalysis::compute(&sig).unwrap();
        let domains = sample_domains(&sig, &an);
        let sorts: Vec<SortId> = sig.sorts().collect();
        let n = rng.gen_range(0..=2);
        let free: Vec<Var> = (0..n)
            .map(|i| Var::new(format!("x{i}"), sorts[rng.gen_range(0..sorts.len())]))
            .collect();
        let p = FormulaProfile {
            quantifier_depth: 2,
            max_atoms: 5,
            free: free.clone(),
            ..Default::default()
        };
        let f = random_formula_with(&mut rng, &sig, &p);
        assert_complementary(&f, &sig, &an, &free, &domains);
    }
}
