//! Rational trees as finite term graphs.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::basic::{BasicFormula, Rhs};
use crate::formula::{Term, Var};
use crate::signature::{GenId, Signature};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub gen: GenId,
    pub children: Vec<usize>,
}

/// A rational tree, always stored as its minimal graph numbered breadth-first
/// from the root, so structural equality is tree equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalTree {
    nodes: Arc<Vec<(GenId, Vec<u32>)>>,
}

impl RationalTree {
    /// The tree rooted at `root` in an arbitrary node table.
    pub fn from_graph(nodes: &[Node], root: usize) -> Self {
        RationalTree {
            nodes: Arc::new(minimize(nodes, root)),
        }
    }

    pub fn apply(g: GenId, args: &[RationalTree]) -> Self {
        let mut nodes = vec![Node {
            gen: g,
            children: Vec::new(),
        }];
        for a in args {
            let off = nodes.len();
            nodes[0].children.push(off);
            nodes.extend(a.nodes.iter().map(|(gen, ch)| Node {
                gen: *gen,
                children: ch.iter().map(|c| *c as usize + off).collect(),
            }));
        }
        Self::from_graph(&nodes, 0)
    }

    pub fn leaf(g: GenId) -> Self {
        Self::apply(g, &[])
    }

    /// `μw. g(…, w, …)` style trees: `pattern` with the variable `hole`
    /// standing for the whole tree.
    pub fn root_gen(&self) -> GenId {
        self.nodes[0].0
    }

    pub fn arity(&self) -> usize {
        self.nodes[0].1.len()
    }

    pub fn child(&self, i: usize) -> RationalTree {
        let root = self.nodes[0].1[i] as usize;
        let nodes: Vec<Node> = self.graph();
        Self::from_graph(&nodes, root)
    }

    pub fn graph(&self) -> Vec<Node> {
        self.nodes
            .iter()
            .map(|(g, ch)| Node {
                gen: *g,
                children: ch.iter().map(|c| *c as usize).collect(),
            })
            .collect()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// No cycle is reachable from the root.
    pub fn is_finite(&self) -> bool {
        // Breadth-first numbering means every edge to an earlier or equal
        // index closes a cycle only if it is a back edge; check properly.
        let n = self.nodes.len();
        let mut state = vec![0u8; n];
        let mut stack = vec![(0usize, 0usize)];
        state[0] = 1;
        while let Some((v, i)) = stack.pop() {
            let ch = &self.nodes[v].1;
            if i < ch.len() {
                stack.push((v, i + 1));
                let w = ch[i] as usize;
                match state[w] {
                    1 => return false,
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
            }
        }
        true
    }

    pub fn to_term(&self) -> Option<Term> {
        if !self.is_finite() {
            return None;
        }
        fn go(nodes: &[(GenId, Vec<u32>)], v: usize) -> Term {
            Term::App(
                nodes[v].0,
                nodes[v].1.iter().map(|c| go(nodes, *c as usize)).collect(),
            )
        }
        Some(go(&self.nodes, 0))
    }

    /// Term syntax with `#n=` labels on nodes that are referred back to.
    pub fn render(&self, sig: &Signature) -> String {
        let n = self.nodes.len();
        let mut on_path = vec![false; n];
        let mut labelled: HashSet<usize> = HashSet::new();
        fn find(
            nodes: &[(GenId, Vec<u32>)],
            v: usize,
            on_path: &mut Vec<bool>,
            labelled: &mut HashSet<usize>,
        ) {
            on_path[v] = true;
            for c in &nodes[v].1 {
                let c = *c as usize;
                if on_path[c] {
                    labelled.insert(c);
                } else {
                    find(nodes, c, on_path, labelled);
                }
            }
            on_path[v] = false;
        }
        find(&self.nodes, 0, &mut on_path, &mut labelled);
        let mut labels: BTreeMap<usize, usize> = BTreeMap::new();
        for v in {
            let mut l: Vec<_> = labelled.into_iter().collect();
            l.sort();
            l
        } {
            let k = labels.len();
            labels.insert(v, k);
        }
        let mut out = String::new();
        let mut on_path = vec![false; n];
        fn write(
            out: &mut String,
            nodes: &[(GenId, Vec<u32>)],
            v: usize,
            sig: &Signature,
            labels: &BTreeMap<usize, usize>,
            on_path: &mut Vec<bool>,
        ) {
            if on_path[v] {
                let _ = write!(out, "#{}#", labels[&v]);
                return;
            }
            if let Some(l) = labels.get(&v) {
                let _ = write!(out, "#{l}=");
            }
            let (g, ch) = &nodes[v];
            if ch.is_empty() {
                out.push_str(sig.gen_name(*g));
                return;
            }
            on_path[v] = true;
            out.push('(');
            out.push_str(sig.gen_name(*g));
            for c in ch {
                out.push(' ');
                write(out, nodes, *c as usize, sig, labels, on_path);
            }
            out.push(')');
            on_path[v] = false;
        }
        write(&mut out, &self.nodes, 0, sig, &labels, &mut on_path);
        out
    }

    /// Closed finite term to tree.
    pub fn from_ground(t: &Term) -> Option<Self> {
        match t {
            Term::App(g, args) => {
                let args = args
                    .iter()
                    .map(Self::from_ground)
                    .collect::<Option<Vec<_>>>()?;
                Some(Self::apply(*g, &args))
            }
            _ => None,
        }
    }
}

/// Partition refinement followed by breadth-first renumbering.
fn minimize(nodes: &[Node], root: usize) -> Vec<(GenId, Vec<u32>)> {
    // Restrict to nodes reachable from the root.
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![root];
    index.insert(root, 0);
    let mut i = 0;
    while i < order.len() {
        for c in &nodes[order[i]].children {
            if !index.contains_key(c) {
                index.insert(*c, order.len());
                order.push(*c);
            }
        }
        i += 1;
    }
    let local: Vec<(GenId, Vec<usize>)> = order
        .iter()
        .map(|v| {
            (
                nodes[*v].gen,
                nodes[*v].children.iter().map(|c| index[c]).collect(),
            )
        })
        .collect();
    let n = local.len();
    let mut class: Vec<usize> = {
        let mut ids: HashMap<(GenId, usize), usize> = HashMap::new();
        local
            .iter()
            .map(|(g, ch)| {
                let k = ids.len();
                *ids.entry((*g, ch.len())).or_insert(k)
            })
            .collect()
    };
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|v| {
                let key = (class[v], local[v].1.iter().map(|c| class[*c]).collect());
                let k = ids.len();
                *ids.entry(key).or_insert(k)
            })
            .collect();
        let before = class.iter().collect::<HashSet<_>>().len();
        let after = ids.len();
        class = next;
        if after == before {
            break;
        }
    }
    // Breadth-first numbering of classes from the root's class.
    let mut rep: HashMap<usize, usize> = HashMap::new();
    for (v, c) in class.iter().enumerate().take(n) {
        rep.entry(*c).or_insert(v);
    }
    let mut number: HashMap<usize, u32> = HashMap::new();
    let mut queue = VecDeque::from([class[0]]);
    number.insert(class[0], 0);
    let mut out = Vec::new();
    while let Some(c) = queue.pop_front() {
        let v = rep[&c];
        let mut ch = Vec::new();
        for w in &local[v].1 {
            let cw = class[*w];
            let k = number.len() as u32;
            let id = *number.entry(cw).or_insert_with(|| {
                queue.push_back(cw);
                k
            });
            ch.push(id);
        }
        out.push((local[v].0, ch));
    }
    out
}

/// Equality of the trees rooted at `a` in `ga` and `b` in `gb`, decided by
/// building the coinductive closure of assumed-equal node pairs.
pub fn rational_tree_equal(ga: &[Node], a: usize, gb: &[Node], b: usize) -> bool {
    let mut assumed: HashSet<(usize, usize)> = HashSet::new();
    let mut stack = vec![(a, b)];
    while let Some((x, y)) = stack.pop() {
        if !assumed.insert((x, y)) {
            continue;
        }
        let (nx, ny) = (&ga[x], &gb[y]);
        if nx.gen != ny.gen || nx.children.len() != ny.children.len() {
            return false;
        }
        stack.extend(nx.children.iter().copied().zip(ny.children.iter().copied()));
    }
    true
}

/// Unique solution of a system of equations with distinct left-hand sides,
/// given values for the variables that are not left-hand sides. Returns
/// `None` if some variable is neither known nor defined.
pub fn solve_equations(
    b: &BasicFormula,
    known: &HashMap<Var, RationalTree>,
) -> Option<HashMap<Var, RationalTree>> {
    let mut nodes: Vec<Node> = Vec::new();
    let mut slot: HashMap<Var, usize> = HashMap::new();
    for (v, t) in known {
        let off = nodes.len();
        nodes.extend(t.graph().into_iter().map(|n| Node {
            gen: n.gen,
            children: n.children.iter().map(|c| c + off).collect(),
        }));
        slot.insert(v.clone(), off);
    }
    let defs: HashMap<&Var, &Rhs> = b
        .eqs
        .iter()
        .filter(|e| !known.contains_key(&e.lhs))
        .map(|e| (&e.lhs, &e.rhs))
        .collect();
    for (v, rhs) in &defs {
        if let Rhs::App(g, _) = rhs {
            slot.insert((*v).clone(), nodes.len());
            nodes.push(Node {
                gen: *g,
                children: Vec::new(),
            });
        }
    }
    fn resolve(
        v: &Var,
        slot: &HashMap<Var, usize>,
        defs: &HashMap<&Var, &Rhs>,
        depth: usize,
    ) -> Option<usize> {
        if let Some(s) = slot.get(v) {
            return Some(*s);
        }
        if depth > defs.len() {
            return None;
        }
        match defs.get(v) {
            Some(Rhs::Var(w)) => resolve(w, slot, defs, depth + 1),
            _ => None,
        }
    }
    for (v, rhs) in &defs {
        if let Rhs::App(_, ws) = rhs {
            let ch = ws
                .iter()
                .map(|w| resolve(w, &slot, &defs, 0))
                .collect::<Option<Vec<_>>>()?;
            let s = slot[*v];
            nodes[s].children = ch;
        }
    }
    let mut out = known.clone();
    for v in b.vars() {
        if let std::collections::hash_map::Entry::Vacant(e) = out.entry(v) {
            let s = resolve(e.key(), &slot, &defs, 0)?;
            e.insert(RationalTree::from_graph(&nodes, s));
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basic::Equation;
    use crate::signature::example_signature;

    #[test]
    fn unfolded_cycle_is_equal() {
        let sig = example_signature();
        let succ = sig.generator_by_name("succ").unwrap();
        let one = vec![Node {
            gen: succ,
            children: vec![0],
        }];
        let two = vec![
            Node {
                gen: succ,
                children: vec![1],
            },
            Node {
                gen: succ,
                children: vec![0],
            },
        ];
        assert!(rational_tree_equal(&one, 0, &two, 0));
        assert_eq!(
            RationalTree::from_graph(&one, 0),
            RationalTree::from_graph(&two, 0)
        );
        assert!(!RationalTree::from_graph(&one, 0).is_finite());
    }

    #[test]
    fn different_roots_differ() {
        let sig = example_signature();
        let zero = sig.generator_by_name("zero").unwrap();
        let succ = sig.generator_by_name("succ").unwrap();
        let a = RationalTree::leaf(zero);
        let b = RationalTree::apply(succ, std::slice::from_ref(&a));
        assert_ne!(a, b);
        assert!(b.is_finite());
        assert_eq!(b.child(0), a);
        assert_eq!(b.render(&sig), "(succ zero)");
    }

    #[test]
    fn node_table_reading() {
        let sig = example_signature();
        let nat = sig.sort("nat").unwrap();
        let succ = sig.generator_by_name("succ").unwrap();
        let x = Var::new("x", nat);
        let b = BasicFormula {
            eqs: vec![Equation::app(x.clone(), succ, vec![x.clone()])],
            fins: vec![],
        };
        let sol = solve_equations(&b, &HashMap::new()).unwrap();
        assert_eq!(sol[&x].render(&sig), "#0=(succ #0#)");
    }
}
