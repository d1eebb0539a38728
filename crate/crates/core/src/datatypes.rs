//! Datatype and codatatype declarations, selector elimination, and the
//! embedding of (co)datatype formulae into the theory of trees.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{compute_zero_sets, SortAnalysis};
use crate::formula::{Formula, FreshNames, Selector, Term, Var};
use crate::oracle::enumerate::default_trees;
use crate::oracle::{RationalTree, SelectorModel};
use crate::signature::{GenId, Signature, SignatureError, SortId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DatatypeKind {
    Datatype,
    Codatatype,
}

impl DatatypeKind {
    fn name(self) -> &'static str {
        match self {
            DatatypeKind::Datatype => "datatype",
            DatatypeKind::Codatatype => "codatatype",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructorDecl {
    pub name: String,
    /// Selector name and argument sort, in argument order.
    pub fields: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatatypeDecl {
    pub name: String,
    pub kind: DatatypeKind,
    pub constructors: Vec<ConstructorDecl>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatatypeError {
    #[error("{0} has no constructors")]
    NoConstructors(String),
    #[error("selector {selector} is declared more than once (in {datatype})")]
    DuplicateSelector { datatype: String, selector: String },
    #[error("{kind} {datatype} uses {other} in constructor {constructor}; datatypes and codatatypes cannot be mixed")]
    MixedDeclaration {
        kind: &'static str,
        datatype: String,
        constructor: String,
        other: String,
    },
    #[error("datatype {0} has no finite values; declare it as a codatatype instead")]
    NonWellFounded(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("no default value for selector {selector} of constructor {constructor}")]
    MissingDefault {
        constructor: String,
        selector: String,
    },
    #[error("default value for selector {selector} of {constructor} has the wrong sort")]
    DefaultSort {
        constructor: String,
        selector: String,
    },
    #[error("standard selector semantics needs a quantifier-free formula; use default values for quantified input")]
    QuantifiedInput,
}

/// The tree signature of a set of declarations, with the kind of every sort
/// and the selector names.
#[derive(Clone, Debug)]
pub struct DatatypeSignature {
    pub sig: Signature,
    kinds: BTreeMap<SortId, DatatypeKind>,
    selector_names: BTreeMap<Selector, String>,
    selectors: HashMap<String, Selector>,
}

impl DatatypeSignature {
    pub fn kind(&self, s: SortId) -> DatatypeKind {
        self.kinds[&s]
    }

    pub fn is_datatype(&self, s: SortId) -> bool {
        self.kinds.get(&s) == Some(&DatatypeKind::Datatype)
    }

    pub fn selector(&self, name: &str) -> Option<Selector> {
        self.selectors.get(name).copied()
    }

    pub fn selector_name(&self, s: Selector) -> &str {
        &self.selector_names[&s]
    }

    pub fn selectors(&self) -> impl Iterator<Item = (Selector, &str)> {
        self.selector_names.iter().map(|(s, n)| (*s, n.as_str()))
    }

    /// Result sort of a selector.
    pub fn selector_sort(&self, s: Selector) -> SortId {
        self.sig.generator(s.ctor).args[s.index]
    }
}

/// Checks that no declaration mixes datatypes and codatatypes and that every
/// datatype has a finite value, and builds the tree signature whose
/// generators are the constructors.
pub fn check_declarations(decls: &[DatatypeDecl]) -> Result<DatatypeSignature, DatatypeError> {
    let kinds_by_name: HashMap<&str, DatatypeKind> =
        decls.iter().map(|d| (d.name.as_str(), d.kind)).collect();
    let mut b = Signature::builder();
    let mut data_only = Signature::builder();
    let mut seen_selectors: HashMap<&str, &str> = HashMap::new();
    for d in decls {
        b.sort(&d.name);
        if d.kind == DatatypeKind::Datatype {
            data_only.sort(&d.name);
        }
    }
    for d in decls {
        if d.constructors.is_empty() {
            return Err(DatatypeError::NoConstructors(d.name.clone()));
        }
        for c in &d.constructors {
            for (sel, sort) in &c.fields {
                if seen_selectors.insert(sel, &d.name).is_some() {
                    return Err(DatatypeError::DuplicateSelector {
                        datatype: d.name.clone(),
                        selector: sel.clone(),
                    });
                }
                match kinds_by_name.get(sort.as_str()) {
                    None => return Err(SignatureError::UnknownSort(sort.clone()).into()),
                    Some(k) if *k != d.kind => {
                        return Err(DatatypeError::MixedDeclaration {
                            kind: d.kind.name(),
                            datatype: d.name.clone(),
                            constructor: c.name.clone(),
                            other: sort.clone(),
                        })
                    }
                    Some(_) => {}
                }
            }
            let args: Vec<String> = c.fields.iter().map(|(_, s)| s.clone()).collect();
            b.generator_owned(c.name.clone(), args.clone(), d.name.clone());
            if d.kind == DatatypeKind::Datatype {
                data_only.generator_owned(c.name.clone(), args, d.name.clone());
            }
        }
    }
    let sig = b.build()?;
    let data_sig = data_only.build()?;
    if let Some(s) = compute_zero_sets(&data_sig).no_finite.iter().next() {
        return Err(DatatypeError::NonWellFounded(
            data_sig.sort_name(*s).to_string(),
        ));
    }
    let mut kinds = BTreeMap::new();
    let mut selector_names = BTreeMap::new();
    let mut selectors = HashMap::new();
    for d in decls {
        let s = sig.sort(&d.name).expect("declared above");
        kinds.insert(s, d.kind);
        for c in &d.constructors {
            let ctor = sig.generator_by_name(&c.name).expect("declared above");
            for (i, (name, _)) in c.fields.iter().enumerate() {
                let sel = Selector { ctor, index: i };
                selector_names.insert(sel, name.clone());
                selectors.insert(name.clone(), sel);
            }
        }
    }
    Ok(DatatypeSignature {
        sig,
        kinds,
        selector_names,
        selectors,
    })
}

/// Values of selectors applied to the wrong constructor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DefaultValueTable {
    values: BTreeMap<Selector, RationalTree>,
}

impl DefaultValueTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        dsig: &DatatypeSignature,
        sel: Selector,
        value: RationalTree,
    ) -> Result<(), DatatypeError> {
        if value_sort(&dsig.sig, &value) != dsig.selector_sort(sel) {
            return Err(DatatypeError::DefaultSort {
                constructor: dsig.sig.gen_name(sel.ctor).to_string(),
                selector: dsig.selector_name(sel).to_string(),
            });
        }
        self.values.insert(sel, value);
        Ok(())
    }

    pub fn get(&self, sel: Selector) -> Option<&RationalTree> {
        self.values.get(&sel)
    }

    /// [`default_value_for`] the result sort of every selector, keeping the
    /// entries already present.
    pub fn fill_missing(&mut self, dsig: &DatatypeSignature, analysis: &SortAnalysis) {
        let defaults = default_trees(&dsig.sig, analysis);
        for (sel, _) in dsig.selectors() {
            self.values
                .entry(sel)
                .or_insert_with(|| defaults[&dsig.selector_sort(sel)].clone());
        }
    }
}

fn value_sort(sig: &Signature, t: &RationalTree) -> SortId {
    sig.generator(t.root_gen()).result
}

/// Selector model of the default-value semantics.
impl SelectorModel for DefaultValueTable {
    fn apply(&self, sel: Selector, arg: &RationalTree) -> Option<RationalTree> {
        if arg.root_gen() == sel.ctor {
            Some(arg.child(sel.index))
        } else {
            self.get(sel).cloned()
        }
    }
}

/// The minimal finite tree of a sort, or a cycle through the smallest
/// generators when the sort has no finite trees.
pub fn default_value_for(s: SortId, sig: &Signature, analysis: &SortAnalysis) -> RationalTree {
    default_trees(sig, analysis)
        .remove(&s)
        .expect("every sort has a default")
}

/// `t = value`, introducing one existential variable per node when the
/// value is infinite.
pub fn equals_tree(
    t: Term,
    value: &RationalTree,
    sig: &Signature,
    fresh: &mut FreshNames,
) -> Formula {
    if let Some(term) = value.to_term() {
        return Formula::eq(t, term);
    }
    let graph = value.graph();
    let nodes: Vec<Var> = graph
        .iter()
        .map(|n| fresh.var(sig.generator(n.gen).result))
        .collect();
    let mut parts = vec![Formula::eq(t, Term::var(&nodes[0]))];
    for (v, n) in nodes.iter().zip(&graph) {
        parts.push(Formula::eq(
            Term::var(v),
            Term::App(
                n.gen,
                n.children.iter().map(|c| Term::var(&nodes[*c])).collect(),
            ),
        ));
    }
    Formula::exists(nodes, Formula::and(parts))
}

/// Replaces innermost selector applications in `t` by variables, reusing
/// the variable of an application seen before.
fn name_innermost(
    t: &Term,
    defs: &mut Vec<(Var, Selector, Term)>,
    sig: &Signature,
    fresh: &mut FreshNames,
) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(g, args) => Term::App(
            *g,
            args.iter()
                .map(|a| name_innermost(a, defs, sig, fresh))
                .collect(),
        ),
        Term::Sel(s, inner) if !inner.has_selector() => {
            if let Some((v, _, _)) = defs.iter().find(|(_, s2, t2)| s2 == s && *t2 == **inner) {
                return Term::var(v);
            }
            let v = fresh.var(t.sort(sig));
            defs.push((v.clone(), *s, (**inner).clone()));
            Term::var(&v)
        }
        Term::Sel(s, inner) => Term::Sel(*s, Box::new(name_innermost(inner, defs, sig, fresh))),
    }
}

/// Terms of an atom with every selector application named, innermost first.
fn isolate_selectors(
    terms: Vec<Term>,
    defs: &mut Vec<(Var, Selector, Term)>,
    sig: &Signature,
    fresh: &mut FreshNames,
) -> Vec<Term> {
    let mut terms = terms;
    while terms.iter().any(Term::has_selector) {
        terms = terms
            .iter()
            .map(|t| name_innermost(t, defs, sig, fresh))
            .collect();
    }
    terms
}

/// `∃z̄. t = C(z̄) ∧ body(z̄)`.
fn constructor_case(
    t: &Term,
    ctor: GenId,
    sig: &Signature,
    fresh: &mut FreshNames,
    body: impl FnOnce(&[Var]) -> Formula,
) -> Formula {
    let zs: Vec<Var> = sig
        .generator(ctor)
        .args
        .iter()
        .map(|a| fresh.var(*a))
        .collect();
    let app = Term::App(ctor, zs.iter().map(Term::var).collect());
    let b = body(&zs);
    Formula::exists(zs, Formula::and(vec![Formula::eq(t.clone(), app), b]))
}

fn map_atoms(
    f: &Formula,
    g: &mut dyn FnMut(&Formula) -> Result<Formula, DatatypeError>,
) -> Result<Formula, DatatypeError> {
    Ok(match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(..) | Formula::Fin(_) => g(f)?,
        Formula::Not(a) => Formula::Not(Box::new(map_atoms(a, g)?)),
        Formula::And(fs) => Formula::And(
            fs.iter()
                .map(|a| map_atoms(a, g))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Or(fs) => Formula::Or(
            fs.iter()
                .map(|a| map_atoms(a, g))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Implies(a, b) => {
            Formula::Implies(Box::new(map_atoms(a, g)?), Box::new(map_atoms(b, g)?))
        }
        Formula::Iff(a, b) => Formula::Iff(Box::new(map_atoms(a, g)?), Box::new(map_atoms(b, g)?)),
        Formula::Exists(vs, a) => Formula::Exists(vs.clone(), Box::new(map_atoms(a, g)?)),
        Formula::Forall(vs, a) => Formula::Forall(vs.clone(), Box::new(map_atoms(a, g)?)),
    })
}

fn rebuild_atom(atom: &Formula, terms: Vec<Term>) -> Formula {
    let mut it = terms.into_iter();
    match atom {
        Formula::Eq(..) => Formula::eq(it.next().unwrap(), it.next().unwrap()),
        Formula::Fin(_) => Formula::fin(it.next().unwrap()),
        _ => unreachable!("only atoms are rebuilt"),
    }
}

fn atom_terms(atom: &Formula) -> Vec<Term> {
    match atom {
        Formula::Eq(a, b) => vec![a.clone(), b.clone()],
        Formula::Fin(t) => vec![t.clone()],
        _ => Vec::new(),
    }
}

/// An equivalent selector-free formula under the semantics where a selector
/// applied to the wrong constructor returns the value from `defaults`.
pub fn eliminate_selectors_default(
    f: &Formula,
    dsig: &DatatypeSignature,
    defaults: &DefaultValueTable,
) -> Result<Formula, DatatypeError> {
    if !f.has_selector() {
        return Ok(f.clone());
    }
    let sig = &dsig.sig;
    let mut fresh = FreshNames::avoiding(f);
    map_atoms(f, &mut |atom| {
        if !atom.has_selector() {
            return Ok(atom.clone());
        }
        let mut defs = Vec::new();
        let terms = isolate_selectors(atom_terms(atom), &mut defs, sig, &mut fresh);
        let mut parts = vec![rebuild_atom(atom, terms)];
        let mut bound = Vec::new();
        for (x, sel, t) in defs {
            let default = defaults
                .get(sel)
                .ok_or_else(|| DatatypeError::MissingDefault {
                    constructor: sig.gen_name(sel.ctor).to_string(),
                    selector: dsig.selector_name(sel).to_string(),
                })?;
            let matching = constructor_case(&t, sel.ctor, sig, &mut fresh, |zs| {
                Formula::eq(Term::var(&x), Term::var(&zs[sel.index]))
            });
            let other = Formula::and(vec![
                Formula::not(constructor_case(&t, sel.ctor, sig, &mut fresh, |_| {
                    Formula::True
                })),
                equals_tree(Term::var(&x), default, sig, &mut fresh),
            ]);
            parts.push(Formula::or(vec![matching, other]));
            bound.push(x);
        }
        Ok(Formula::exists(bound, Formula::and(parts)))
    })
}

/// An equisatisfiable selector-free formula under the semantics where a
/// selector applied to the wrong constructor is unspecified. Each selector
/// application becomes a variable constrained to agree with the constructor
/// argument when the constructor matches, and to agree with the other
/// applications of the same selector to equal arguments.
pub fn eliminate_selectors_standard(
    f: &Formula,
    dsig: &DatatypeSignature,
) -> Result<Formula, DatatypeError> {
    if f.has_quantifier() {
        return Err(DatatypeError::QuantifiedInput);
    }
    if !f.has_selector() {
        return Ok(f.clone());
    }
    let sig = &dsig.sig;
    let mut fresh = FreshNames::avoiding(f);
    let mut defs: Vec<(Var, Selector, Term)> = Vec::new();
    let body = map_atoms(f, &mut |atom| {
        let terms = isolate_selectors(atom_terms(atom), &mut defs, sig, &mut fresh);
        Ok(rebuild_atom(atom, terms))
    })?;
    let mut parts = Vec::new();
    for (j, (v, sel, t)) in defs.iter().enumerate() {
        let zs: Vec<Var> = sig
            .generator(sel.ctor)
            .args
            .iter()
            .map(|a| fresh.var(*a))
            .collect();
        let app = Term::App(sel.ctor, zs.iter().map(Term::var).collect());
        parts.push(Formula::forall(
            zs.clone(),
            Formula::implies(
                Formula::eq(t.clone(), app),
                Formula::eq(Term::var(&zs[sel.index]), Term::var(v)),
            ),
        ));
        for (v2, sel2, t2) in &defs[j + 1..] {
            if sel2 == sel {
                parts.push(Formula::implies(
                    Formula::eq(t.clone(), t2.clone()),
                    Formula::eq(Term::var(v), Term::var(v2)),
                ));
            }
        }
    }
    parts.push(body);
    Ok(Formula::and(parts))
}

/// An equisatisfiable formula over trees: quantified and free variables of
/// datatype sorts are restricted to finite trees.
pub fn embed_in_trees(f: &Formula, dsig: &DatatypeSignature) -> Formula {
    fn go(f: &Formula, dsig: &DatatypeSignature) -> Formula {
        match f {
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Fin(_) => f.clone(),
            Formula::Not(a) => Formula::Not(Box::new(go(a, dsig))),
            Formula::And(fs) => Formula::And(fs.iter().map(|a| go(a, dsig)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|a| go(a, dsig)).collect()),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(go(a, dsig)), Box::new(go(b, dsig)))
            }
            Formula::Iff(a, b) => Formula::Iff(Box::new(go(a, dsig)), Box::new(go(b, dsig))),
            Formula::Exists(vs, a) => {
                Formula::Exists(vs.clone(), Box::new(guarded(vs, go(a, dsig), dsig)))
            }
            Formula::Forall(vs, a) => Formula::not(Formula::Exists(
                vs.clone(),
                Box::new(guarded(vs, Formula::not(go(a, dsig)), dsig)),
            )),
        }
    }
    fn guarded(vs: &[Var], body: Formula, dsig: &DatatypeSignature) -> Formula {
        let mut parts: Vec<Formula> = vs
            .iter()
            .filter(|v| dsig.is_datatype(v.sort()))
            .map(|v| Formula::fin(Term::var(v)))
            .collect();
        if parts.is_empty() {
            return body;
        }
        parts.push(body);
        Formula::And(parts)
    }
    let inner = go(f, dsig);
    let free = crate::formula::free_variables(f);
    guarded(&free, inner, dsig)
}
