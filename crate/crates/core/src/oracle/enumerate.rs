//! Enumeration of trees of a sort.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::analysis::SortAnalysis;
use crate::basic::BasicFormula;
use crate::formula::{Term, Var};
use crate::signature::{GenId, Signature, SortId};

use super::eval::EvalError;
use super::tree::{solve_equations, Node, RationalTree};

/// Value of a term whose variables are bound in `env`.
pub fn term_value(t: &Term, env: &HashMap<Var, RationalTree>) -> Option<RationalTree> {
    match t {
        Term::Var(v) => env.get(v).cloned(),
        Term::App(g, args) => {
            let args = args
                .iter()
                .map(|a| term_value(a, env))
                .collect::<Option<Vec<_>>>()?;
            Some(RationalTree::apply(*g, &args))
        }
        Term::Sel(..) => None,
    }
}

/// Value of a term from the analysis' inhabitant lists, whose reserved
/// variables denote unique infinite trees.
pub fn analysis_term_value(t: &Term, analysis: &SortAnalysis) -> RationalTree {
    let eqs = analysis.equations_for(t);
    let env = solve_equations(
        &BasicFormula {
            eqs,
            fins: Vec::new(),
        },
        &HashMap::new(),
    )
    .expect("unique infinite tree equations define every reserved variable");
    term_value(t, &env).expect("inhabitant terms only use reserved variables")
}

/// All trees of a sort with finitely many finite and infinite trees.
pub fn enumerate_domain(
    s: SortId,
    sig: &Signature,
    analysis: &SortAnalysis,
) -> Result<Vec<RationalTree>, EvalError> {
    if !analysis.is_finite_domain(s) {
        return Err(EvalError::InfiniteDomain(sig.sort_name(s).to_string()));
    }
    Ok(analysis
        .fin_terms(s)
        .iter()
        .chain(analysis.infin_terms(s))
        .map(|t| analysis_term_value(t, analysis))
        .collect())
}

/// Up to `limit` finite trees per sort, smallest depth first.
pub fn finite_trees(sig: &Signature, limit: usize) -> BTreeMap<SortId, Vec<RationalTree>> {
    let mut out: BTreeMap<SortId, Vec<RationalTree>> =
        sig.sorts().map(|s| (s, Vec::new())).collect();
    let mut seen: BTreeSet<RationalTree> = BTreeSet::new();
    loop {
        let mut added = false;
        let snapshot = out.clone();
        for s in sig.sorts() {
            for g in sig.generators_of(s) {
                let arg_sorts = &sig.generator(*g).args;
                let pools: Vec<&Vec<RationalTree>> =
                    arg_sorts.iter().map(|a| &snapshot[a]).collect();
                for args in product(&pools, limit) {
                    if out[&s].len() >= limit {
                        break;
                    }
                    let t = RationalTree::apply(*g, &args);
                    if seen.insert(t.clone()) {
                        out.get_mut(&s).unwrap().push(t);
                        added = true;
                    }
                }
            }
        }
        if !added {
            return out;
        }
    }
}

/// At most `limit` tuples from the cartesian product, in odometer order.
fn product(pools: &[&Vec<RationalTree>], limit: usize) -> Vec<Vec<RationalTree>> {
    if pools.iter().any(|p| p.is_empty()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; pools.len()];
    loop {
        out.push(idx.iter().zip(pools).map(|(i, p)| p[*i].clone()).collect());
        if out.len() >= limit {
            return out;
        }
        let mut k = 0;
        loop {
            if k == pools.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < pools[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// A finite tree of minimal depth per sort that has one, taking the
/// lexicographically smallest generator at each choice.
pub fn minimal_finite_trees(sig: &Signature) -> BTreeMap<SortId, RationalTree> {
    let mut out: BTreeMap<SortId, RationalTree> = BTreeMap::new();
    loop {
        // Each round adds exactly the sorts whose minimal depth is the round number.
        let mut found = Vec::new();
        for s in sig.sorts().filter(|s| !out.contains_key(s)) {
            let mut gens: Vec<GenId> = sig.generators_of(s).to_vec();
            gens.sort_by_key(|g| sig.gen_name(*g));
            if let Some(g) = gens
                .into_iter()
                .find(|g| sig.generator(*g).args.iter().all(|a| out.contains_key(a)))
            {
                let args: Vec<RationalTree> = sig
                    .generator(g)
                    .args
                    .iter()
                    .map(|a| out[a].clone())
                    .collect();
                found.push((s, RationalTree::apply(g, &args)));
            }
        }
        if found.is_empty() {
            return out;
        }
        out.extend(found);
    }
}

/// One rational tree per sort: the minimal finite tree when there is one,
/// otherwise a cycle through the smallest generators.
pub fn default_trees(sig: &Signature, analysis: &SortAnalysis) -> BTreeMap<SortId, RationalTree> {
    let minimal = minimal_finite_trees(sig);
    let fin: BTreeMap<SortId, Vec<RationalTree>> = sig
        .sorts()
        .map(|s| (s, minimal.get(&s).cloned().into_iter().collect()))
        .collect();
    let mut nodes: Vec<Node> = Vec::new();
    let mut slot: HashMap<SortId, usize> = HashMap::new();
    let cyclic: Vec<SortId> = sig.sorts().filter(|s| !analysis.has_finite(*s)).collect();
    for s in &cyclic {
        slot.insert(*s, nodes.len());
        let g = smallest_generator(sig, *s);
        nodes.push(Node {
            gen: g,
            children: Vec::new(),
        });
    }
    for s in &cyclic {
        let g = nodes[slot[s]].gen;
        let mut ch = Vec::new();
        for a in &sig.generator(g).args {
            match fin[a].first() {
                Some(t) => ch.push(embed(&mut nodes, t)),
                None => ch.push(slot[a]),
            }
        }
        let i = slot[s];
        nodes[i].children = ch;
    }
    sig.sorts()
        .map(|s| {
            let t = match fin[&s].first() {
                Some(t) => t.clone(),
                None => RationalTree::from_graph(&nodes, slot[&s]),
            };
            (s, t)
        })
        .collect()
}

fn smallest_generator(sig: &Signature, s: SortId) -> GenId {
    *sig.generators_of(s)
        .iter()
        .min_by_key(|g| sig.gen_name(**g))
        .expect("validated sorts have generators")
}

fn embed(nodes: &mut Vec<Node>, t: &RationalTree) -> usize {
    let off = nodes.len();
    nodes.extend(t.graph().into_iter().map(|n| Node {
        gen: n.gen,
        children: n.children.iter().map(|c| c + off).collect(),
    }));
    off
}

/// Up to `limit` infinite rational trees per sort: simple cycles through a
/// generator, and finite prefixes on top of them.
pub fn infinite_trees(
    sig: &Signature,
    analysis: &SortAnalysis,
    limit: usize,
) -> BTreeMap<SortId, Vec<RationalTree>> {
    let fin = finite_trees(sig, 2);
    let defaults = default_trees(sig, analysis);
    let filler = |a: SortId| -> Vec<RationalTree> {
        let mut v = fin[&a].clone();
        if v.is_empty() {
            v.push(defaults[&a].clone());
        }
        v
    };
    let mut out: BTreeMap<SortId, Vec<RationalTree>> =
        sig.sorts().map(|s| (s, Vec::new())).collect();
    let mut seen: BTreeSet<RationalTree> = BTreeSet::new();
    let mut push = |out: &mut BTreeMap<SortId, Vec<RationalTree>>, s: SortId, t: RationalTree| {
        if t.is_finite() || out[&s].len() >= limit || !seen.insert(t.clone()) {
            return false;
        }
        out.get_mut(&s).unwrap().push(t);
        true
    };
    // A node per sort with infinite trees, each pointing at another such node.
    let inf_sorts: Vec<SortId> = sig.sorts().filter(|s| analysis.has_infinite(*s)).collect();
    let mut nodes: Vec<Node> = Vec::new();
    let mut slot: HashMap<SortId, usize> = HashMap::new();
    for s in &inf_sorts {
        slot.insert(*s, nodes.len());
        nodes.push(Node {
            gen: GenId(0),
            children: Vec::new(),
        });
    }
    for s in &inf_sorts {
        let g = sig
            .generators_of(*s)
            .iter()
            .copied()
            .filter(|g| {
                sig.generator(*g)
                    .args
                    .iter()
                    .any(|a| analysis.has_infinite(*a))
            })
            .min_by_key(|g| sig.gen_name(*g))
            .expect("a sort with infinite trees has a generator with such an argument");
        let mut ch = Vec::new();
        let mut linked = false;
        for a in &sig.generator(g).args {
            if !linked && analysis.has_infinite(*a) {
                ch.push(slot[a]);
                linked = true;
            } else {
                let t = filler(*a)[0].clone();
                ch.push(embed(&mut nodes, &t));
            }
        }
        let i = slot[s];
        nodes[i] = Node {
            gen: g,
            children: ch,
        };
    }
    for s in &inf_sorts {
        push(&mut out, *s, RationalTree::from_graph(&nodes, slot[s]));
    }
    // Self loops μw. g(…, w, …) with finite fillers.
    for s in &inf_sorts {
        for g in sig.generators_of(*s) {
            let args = &sig.generator(*g).args;
            for (i, a) in args.iter().enumerate() {
                if a != s {
                    continue;
                }
                let pools: Vec<Vec<RationalTree>> = args
                    .iter()
                    .enumerate()
                    .map(|(j, b)| {
                        if j == i {
                            vec![defaults[b].clone()]
                        } else {
                            filler(*b)
                        }
                    })
                    .collect();
                let refs: Vec<&Vec<RationalTree>> = pools.iter().collect();
                for choice in product(&refs, limit) {
                    let mut graph = vec![Node {
                        gen: *g,
                        children: vec![0; args.len()],
                    }];
                    for (j, t) in choice.iter().enumerate() {
                        graph[0].children[j] = if j == i { 0 } else { embed(&mut graph, t) };
                    }
                    push(&mut out, *s, RationalTree::from_graph(&graph, 0));
                }
            }
        }
    }
    // Finite prefixes on top of the trees found so far.
    for _round in 0..3 {
        let snapshot = out.clone();
        for s in &inf_sorts {
            for g in sig.generators_of(*s) {
                let args = &sig.generator(*g).args;
                for (i, a) in args.iter().enumerate() {
                    for inner in snapshot[a].iter().take(limit) {
                        let pools: Vec<Vec<RationalTree>> = args
                            .iter()
                            .enumerate()
                            .map(|(j, b)| {
                                if j == i {
                                    vec![inner.clone()]
                                } else {
                                    filler(*b)
                                }
                            })
                            .collect();
                        let refs: Vec<&Vec<RationalTree>> = pools.iter().collect();
                        for choice in product(&refs, 4) {
                            push(&mut out, *s, RationalTree::apply(*g, &choice));
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::example_signature;

    #[test]
    fn bool_domain() {
        let sig = example_signature();
        let an = SortAnalysis::compute(&sig).unwrap();
        let dom = enumerate_domain(sig.sort("bool").unwrap(), &sig, &an).unwrap();
        assert_eq!(dom.len(), 2);
        assert!(enumerate_domain(sig.sort("t").unwrap(), &sig, &an).is_err());
    }

    #[test]
    fn nat_has_one_infinite_tree() {
        let sig = example_signature();
        let an = SortAnalysis::compute(&sig).unwrap();
        let inf = infinite_trees(&sig, &an, 10);
        let nat = sig.sort("nat").unwrap();
        assert_eq!(inf[&nat].len(), 1);
        assert_eq!(inf[&nat][0].render(&sig), "#0=(succ #0#)");
        let t = sig.sort("t").unwrap();
        assert_eq!(inf[&t].len(), 2);
        assert!(inf[&sig.sort("inftree").unwrap()].len() >= 5);
    }

    #[test]
    fn defaults_per_sort() {
        let sig = example_signature();
        let an = SortAnalysis::compute(&sig).unwrap();
        let d = default_trees(&sig, &an);
        assert_eq!(d[&sig.sort("nat").unwrap()].render(&sig), "zero");
        assert_eq!(d[&sig.sort("list").unwrap()].render(&sig), "nil");
        assert_eq!(
            d[&sig.sort("inftree").unwrap()].render(&sig),
            "#0=(tree1 #0#)"
        );
    }

    #[test]
    fn finite_trees_are_distinct_and_finite() {
        let sig = example_signature();
        let fin = finite_trees(&sig, 20);
        let nat = sig.sort("nat").unwrap();
        assert_eq!(fin[&nat].len(), 20);
        assert!(fin[&nat].iter().all(RationalTree::is_finite));
        assert!(fin[&sig.sort("inftree").unwrap()].is_empty());
        assert_eq!(fin[&sig.sort("bool").unwrap()].len(), 2);
    }
}
