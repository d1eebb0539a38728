//! Invariants checked on random inputs.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::Rng;
use treetheory::basic::{canonical_solved_key, solve_basic, solve_basic_scheduled, BasicOutcome};
use treetheory::formula::to_sexpr;
use treetheory::oracle::random::{
    random_basic, random_finite_signature, random_formula_with, random_signature, rng_from_seed,
};
use treetheory::oracle::{
    enumerate_domain, rational_tree_equal, Evaluator, FormulaProfile, Node, RationalTree, Valuation,
};
use treetheory::{
    canonicalize, normalize, Formula, FreshNames, GenId, Signature, SortAnalysis, SortId, Var,
};

fn valuations(vars: &[Var], domains: &BTreeMap<SortId, Vec<RationalTree>>) -> Vec<Valuation> {
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

fn open_formula(seed: u64) -> (Signature, SortAnalysis, Vec<Var>, Formula) {
    let mut rng = rng_from_seed(seed);
    let sig = random_finite_signature(&mut rng);
    let an = SortAnalysis::compute(&sig).unwrap();
    let sorts: Vec<SortId> = sig.sorts().collect();
    let free: Vec<Var> = (0..rng.gen_range(0..=2))
        .map(|i| Var::new(format!("x{i}"), sorts[rng.gen_range(0..sorts.len())]))
        .collect();
    let p = FormulaProfile {
        quantifier_depth: 2,
        max_atoms: 6,
        term_depth: 2,
        free: free.clone(),
        ..Default::default()
    };
    let f = random_formula_with(&mut rng, &sig, &p);
    (sig, an, free, f)
}

type SolvedKey = (Vec<(Var, Var)>, Vec<treetheory::Equation>, Vec<Var>);

fn key(order: &[Var], o: &BasicOutcome) -> Option<SolvedKey> {
    match o {
        BasicOutcome::Solved(s) => Some(canonical_solved_key(order, s)),
        BasicOutcome::Contradiction(_) => None,
    }
}

/// A node table over a unary generator 0 and a binary generator 1, with
/// children indices taken modulo the table size.
fn graph(raw: &[(bool, usize, usize)]) -> Vec<Node> {
    let n = raw.len();
    raw.iter()
        .map(|(binary, a, b)| {
            if *binary {
                Node {
                    gen: GenId(1),
                    children: vec![a % n, b % n],
                }
            } else {
                Node {
                    gen: GenId(0),
                    children: vec![a % n],
                }
            }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basic_solving_is_confluent(seed in any::<u64>(), s1 in any::<u64>(), s2 in any::<u64>(), atoms in 1usize..12) {
        let mut rng = rng_from_seed(seed);
        let sig = random_signature(&mut rng);
        let an = SortAnalysis::compute(&sig).unwrap();
        let (order, b) = random_basic(&mut rng, &sig, &an, atoms);
        let reference = key(&order, &solve_basic(&order, &b, &an));
        for s in [s1, s2] {
            let mut pick = rng_from_seed(s);
            let (o, _) = solve_basic_scheduled(&order, &b, &an, &mut |n| pick.gen_range(0..n), 10_000)
                .expect("terminates within the step bound");
            prop_assert_eq!(key(&order, &o), reference.clone(), "{}", b.to_sexpr(&sig));
        }
    }

    #[test]
    fn normal_form_is_equivalent(seed in any::<u64>()) {
        let (sig, an, free, f) = open_formula(seed);
        let mut fresh = FreshNames::avoiding(&f);
        let n = normalize(&f, &sig, &mut fresh).unwrap();
        let g = n.to_formula();
        let domains = sig.sorts().map(|s| (s, enumerate_domain(s, &sig, &an).unwrap())).collect();
        for mut val in valuations(&free, &domains) {
            let a = Evaluator::new(&sig, &an).eval(&f, &mut val.clone()).unwrap();
            let b = Evaluator::new(&sig, &an).eval(&g, &mut val).unwrap();
            prop_assert_eq!(a, b, "{}\n{}", to_sexpr(&f, &sig), to_sexpr(&g, &sig));
        }
    }

    #[test]
    fn canonicalize_is_idempotent(seed in any::<u64>()) {
        let (sig, _, _, f) = open_formula(seed);
        let once = canonicalize(&f, &sig);
        prop_assert_eq!(canonicalize(&once, &sig), once);
    }

    #[test]
    fn minimal_graphs_decide_tree_equality(
        raw in prop::collection::vec((any::<bool>(), 0usize..8, 0usize..8), 1..8),
        r1 in 0usize..8,
        r2 in 0usize..8,
    ) {
        let g = graph(&raw);
        let (a, b) = (r1 % g.len(), r2 % g.len());
        let (ta, tb) = (RationalTree::from_graph(&g, a), RationalTree::from_graph(&g, b));
        prop_assert_eq!(ta == tb, rational_tree_equal(&g, a, &g, b));
        prop_assert!(rational_tree_equal(&ta.graph(), 0, &g, a));
        let children: Vec<RationalTree> = (0..ta.arity()).map(|i| ta.child(i)).collect();
        prop_assert_eq!(RationalTree::apply(ta.root_gen(), &children), ta.clone());
        prop_assert!(ta.num_nodes() <= g.len());
    }
}
