//! Seeded generation of signatures and formulae for differential testing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::SortAnalysis;
use crate::basic::{BasicFormula, Equation};
use crate::datatypes::{ConstructorDecl, DatatypeDecl, DatatypeKind, DatatypeSignature};
use crate::formula::{Formula, Selector, Term, Var};
use crate::signature::{Signature, SortId};

use super::enumerate::finite_trees;

/// Shape limits for [`random_formula`].
#[derive(Clone, Debug)]
pub struct FormulaProfile {
    /// Maximal nesting of quantifiers.
    pub quantifier_depth: usize,
    pub max_atoms: usize,
    /// Maximal nesting of generators in terms.
    pub term_depth: usize,
    pub free: Vec<Var>,
    /// Sorts that may be quantified over; all sorts when empty.
    pub quantifier_sorts: Vec<SortId>,
    pub allow_fin: bool,
    /// Probability of choosing a quantifier when one is allowed.
    pub quantifier_weight: f64,
}

impl Default for FormulaProfile {
    fn default() -> Self {
        FormulaProfile {
            quantifier_depth: 2,
            max_atoms: 6,
            term_depth: 1,
            free: Vec::new(),
            quantifier_sorts: Vec::new(),
            allow_fin: true,
            quantifier_weight: 0.35,
        }
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A formula determined by `seed`, whose free variables are among `profile.free`.
pub fn random_formula(seed: u64, sig: &Signature, profile: &FormulaProfile) -> Formula {
    random_formula_with(&mut rng_from_seed(seed), sig, profile)
}

pub fn random_formula_with(
    rng: &mut impl Rng,
    sig: &Signature,
    profile: &FormulaProfile,
) -> Formula {
    let ground = finite_trees(sig, 1);
    let ground: Vec<Option<Term>> = sig
        .sorts()
        .map(|s| ground[&s].first().and_then(|t| t.to_term()))
        .collect();
    let quantifier_sorts = if profile.quantifier_sorts.is_empty() {
        sig.sorts().collect()
    } else {
        profile.quantifier_sorts.clone()
    };
    let mut g = Gen {
        rng,
        sig,
        profile,
        ground,
        quantifier_sorts,
        counter: 0,
    };
    let mut scope = profile.free.clone();
    let atoms = g.rng.gen_range(1..=profile.max_atoms.max(1));
    g.formula(profile.quantifier_depth, atoms, &mut scope)
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    sig: &'a Signature,
    profile: &'a FormulaProfile,
    ground: Vec<Option<Term>>,
    quantifier_sorts: Vec<SortId>,
    counter: usize,
}

impl<R: Rng> Gen<'_, R> {
    /// A formula with at most `atoms` atoms.
    fn formula(&mut self, qdepth: usize, atoms: usize, scope: &mut Vec<Var>) -> Formula {
        if atoms <= 1 && (qdepth == 0 || self.rng.gen_bool(0.5)) {
            return if self.rng.gen_bool(0.2) {
                Formula::not(self.atom(scope))
            } else {
                self.atom(scope)
            };
        }
        if qdepth > 0 && self.rng.gen_bool(self.profile.quantifier_weight) {
            let n = self.rng.gen_range(1..=2);
            let vs: Vec<Var> = (0..n)
                .map(|_| {
                    self.counter += 1;
                    let s = *self
                        .quantifier_sorts
                        .choose(self.rng)
                        .expect("some sort to quantify over");
                    Var::new(format!("q{}", self.counter), s)
                })
                .collect();
            let len = scope.len();
            scope.extend(vs.iter().cloned());
            let body = self.formula(qdepth - 1, atoms, scope);
            scope.truncate(len);
            return if self.rng.gen_bool(0.5) {
                Formula::exists(vs, body)
            } else {
                Formula::forall(vs, body)
            };
        }
        if atoms <= 1 {
            return Formula::not(self.formula(qdepth, atoms, scope));
        }
        let left = self.rng.gen_range(1..atoms);
        let a = self.formula(qdepth, left, scope);
        let b = self.formula(qdepth, atoms - left, scope);
        match self.rng.gen_range(0..9) {
            0 => Formula::not(Formula::and(vec![a, b])),
            1..=3 => Formula::and(vec![a, b]),
            4..=6 => Formula::or(vec![a, b]),
            7 => Formula::implies(a, b),
            _ => Formula::iff(a, b),
        }
    }

    fn atom(&mut self, scope: &[Var]) -> Formula {
        let usable: Vec<SortId> = self
            .sig
            .sorts()
            .filter(|s| self.ground[s.index()].is_some() || scope.iter().any(|v| v.sort() == *s))
            .collect();
        let s = if !scope.is_empty() && self.rng.gen_bool(0.85) {
            scope.choose(self.rng).unwrap().sort()
        } else {
            match usable.choose(self.rng) {
                Some(s) => *s,
                None => {
                    return if self.rng.gen_bool(0.5) {
                        Formula::True
                    } else {
                        Formula::False
                    }
                }
            }
        };
        if self.profile.allow_fin && self.rng.gen_bool(0.2) {
            return Formula::fin(self.term(s, self.profile.term_depth, scope));
        }
        Formula::eq(
            self.term(s, self.profile.term_depth, scope),
            self.term(s, self.profile.term_depth, scope),
        )
    }

    fn term(&mut self, s: SortId, depth: usize, scope: &[Var]) -> Term {
        let vars: Vec<&Var> = scope.iter().filter(|v| v.sort() == s).collect();
        if !vars.is_empty() && (depth == 0 || self.rng.gen_bool(0.6)) {
            return Term::var(vars.choose(self.rng).unwrap());
        }
        if depth == 0 {
            if let Some(t) = &self.ground[s.index()] {
                // Prefer a constant of the sort when there is one.
                let consts: Vec<_> = self
                    .sig
                    .generators_of(s)
                    .iter()
                    .filter(|g| self.sig.generator(**g).args.is_empty())
                    .copied()
                    .collect();
                return match consts.choose(self.rng) {
                    Some(c) => Term::constant(*c),
                    None => t.clone(),
                };
            }
        }
        // Generators whose arguments can all be built.
        let gens: Vec<_> = self
            .sig
            .generators_of(s)
            .iter()
            .copied()
            .filter(|g| {
                self.sig.generator(*g).args.iter().all(|a| {
                    self.ground[a.index()].is_some() || scope.iter().any(|v| v.sort() == *a)
                })
            })
            .collect();
        match gens.choose(self.rng) {
            Some(g) => {
                let args = self.sig.generator(*g).args.clone();
                Term::App(
                    *g,
                    args.iter()
                        .map(|a| self.term(*a, depth.saturating_sub(1), scope))
                        .collect(),
                )
            }
            None => match &self.ground[s.index()] {
                Some(t) => t.clone(),
                None => Term::var(vars.first().expect("atom sorts are inhabited by a term")),
            },
        }
    }
}

/// A signature whose sorts only refer to earlier sorts, so every sort has
/// finitely many trees, all finite.
pub fn random_finite_signature(rng: &mut impl Rng) -> Signature {
    let n = rng.gen_range(1..=3);
    let mut b = Signature::builder();
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    for s in &names {
        b.sort(s);
    }
    let mut k = 0;
    for (i, s) in names.iter().enumerate() {
        let gens = rng.gen_range(2..=3);
        for j in 0..gens {
            let arity = if i == 0 || j == 0 {
                0
            } else {
                rng.gen_range(0..=2)
            };
            let args: Vec<String> = (0..arity)
                .map(|_| names[rng.gen_range(0..i)].clone())
                .collect();
            b.generator_owned(format!("c{k}"), args, s.clone());
            k += 1;
        }
    }
    b.build().expect("generated signature is well formed")
}

/// A valid signature with possibly recursive sorts.
pub fn random_signature(rng: &mut impl Rng) -> Signature {
    loop {
        let n = rng.gen_range(1..=3);
        let mut b = Signature::builder();
        let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        for s in &names {
            b.sort(s);
        }
        let mut k = 0;
        for s in &names {
            for _ in 0..rng.gen_range(2..=3) {
                let arity = rng.gen_range(0..=2);
                let args: Vec<String> = (0..arity)
                    .map(|_| names.choose(rng).unwrap().clone())
                    .collect();
                b.generator_owned(format!("c{k}"), args, s.clone());
                k += 1;
            }
        }
        if let Ok(sig) = b.build() {
            if sig.validate().is_ok() {
                return sig;
            }
        }
    }
}

/// A random conjunction of flat equations and `fin` atoms over a few
/// variables per sort, with the variable order it is solved under.
pub fn random_basic(
    rng: &mut impl Rng,
    sig: &Signature,
    analysis: &SortAnalysis,
    atoms: usize,
) -> (Vec<Var>, BasicFormula) {
    let mut vars: Vec<Var> = Vec::new();
    for s in sig.sorts() {
        for i in 0..3 {
            vars.push(Var::new(format!("{}{}", sig.sort_name(s), i), s));
        }
    }
    vars.shuffle(rng);
    let mut b = BasicFormula::new();
    for _ in 0..atoms {
        let x = vars.choose(rng).unwrap().clone();
        let s = x.sort();
        let same: Vec<&Var> = vars.iter().filter(|v| v.sort() == s).collect();
        match rng.gen_range(0..10) {
            0 | 1 if analysis.has_finite(s) => b.fins.push(x),
            2..=4 => b
                .eqs
                .push(Equation::var(x, (*same.choose(rng).unwrap()).clone())),
            _ => {
                let g = *sig.generators_of(s).choose(rng).unwrap();
                let args = sig
                    .generator(g)
                    .args
                    .iter()
                    .map(|a| {
                        vars.iter()
                            .filter(|v| v.sort() == *a)
                            .collect::<Vec<_>>()
                            .choose(rng)
                            .map(|v| (*v).clone())
                            .unwrap()
                    })
                    .collect();
                b.eqs.push(Equation::app(x, g, args));
            }
        }
    }
    (vars, b)
}

/// One or two non-recursive datatypes, each with at most eight values: the
/// first has only constants, the second may wrap values of the first.
pub fn random_datatypes(rng: &mut impl Rng) -> Vec<DatatypeDecl> {
    let ctor = |name: String, fields: Vec<(String, String)>| ConstructorDecl { name, fields };
    let first = DatatypeDecl {
        name: "a".into(),
        kind: DatatypeKind::Datatype,
        constructors: (0..rng.gen_range(2..=3))
            .map(|i| ctor(format!("a{i}"), Vec::new()))
            .collect(),
    };
    if rng.gen_bool(0.25) {
        return vec![first];
    }
    let n = first.constructors.len();
    let mut constructors = vec![ctor("b0".into(), Vec::new())];
    let mut size = 1;
    let mut k = 1;
    while constructors.len() < 2 || (constructors.len() < 3 && rng.gen_bool(0.5)) {
        let arity = if size + n * n <= 8 && rng.gen_bool(0.4) {
            2
        } else {
            1
        };
        let fields = (0..arity)
            .map(|i| (format!("s{k}_{i}"), "a".to_string()))
            .collect();
        size += n.pow(arity as u32);
        if size > 8 {
            break;
        }
        constructors.push(ctor(format!("b{k}"), fields));
        k += 1;
    }
    if constructors.len() < 2 {
        constructors.push(ctor(format!("b{k}"), Vec::new()));
    }
    vec![
        first,
        DatatypeDecl {
            name: "b".into(),
            kind: DatatypeKind::Datatype,
            constructors,
        },
    ]
}

/// A quantifier-free formula over `free` whose terms use selectors freely.
pub fn random_selector_formula(
    rng: &mut impl Rng,
    dsig: &DatatypeSignature,
    free: &[Var],
    atoms: usize,
) -> Formula {
    fn term(
        rng: &mut impl Rng,
        dsig: &DatatypeSignature,
        s: SortId,
        depth: usize,
        free: &[Var],
    ) -> Term {
        let sig = &dsig.sig;
        let sels: Vec<Selector> = dsig
            .selectors()
            .map(|(sel, _)| sel)
            .filter(|sel| dsig.selector_sort(*sel) == s)
            .collect();
        let vars: Vec<&Var> = free.iter().filter(|v| v.sort() == s).collect();
        let choice = rng.gen_range(0..10);
        if depth > 0 && !sels.is_empty() && choice < 4 {
            let sel = *sels.choose(rng).unwrap();
            let inner = sig.generator(sel.ctor).result;
            return Term::Sel(sel, Box::new(term(rng, dsig, inner, depth - 1, free)));
        }
        if !vars.is_empty() && (choice < 7 || depth == 0) {
            return Term::var(vars.choose(rng).unwrap());
        }
        let g = *sig.generators_of(s).choose(rng).unwrap();
        let args = sig.generator(g).args.clone();
        Term::App(
            g,
            args.iter()
                .map(|a| term(rng, dsig, *a, depth.saturating_sub(1), free))
                .collect(),
        )
    }
    let sorts: Vec<SortId> = dsig.sig.sorts().collect();
    let parts: Vec<Formula> = (0..atoms.max(1))
        .map(|_| {
            let s = *sorts.choose(rng).unwrap();
            let eq = Formula::eq(term(rng, dsig, s, 2, free), term(rng, dsig, s, 2, free));
            if rng.gen_bool(0.35) {
                Formula::not(eq)
            } else {
                eq
            }
        })
        .collect();
    match rng.gen_range(0..3) {
        0 => Formula::or(parts),
        _ => Formula::and(parts),
    }
}
