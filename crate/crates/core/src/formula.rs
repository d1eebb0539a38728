//! First-order formulae over a tree signature.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::signature::{GenId, Signature, SortId};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    name: Arc<str>,
    sort: SortId,
}

impl Var {
    pub fn new(name: impl Into<Arc<str>>, sort: SortId) -> Self {
        Var {
            name: name.into(),
            sort,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sort(&self) -> SortId {
        self.sort
    }
}

/// Selector `index` (0-based) of constructor `ctor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Selector {
    pub ctor: GenId,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(GenId, Vec<Term>),
    Sel(Selector, Box<Term>),
}

impl Term {
    pub fn var(v: &Var) -> Term {
        Term::Var(v.clone())
    }

    pub fn constant(g: GenId) -> Term {
        Term::App(g, Vec::new())
    }

    pub fn sort(&self, sig: &Signature) -> SortId {
        match self {
            Term::Var(v) => v.sort(),
            Term::App(g, _) => sig.generator(*g).result,
            Term::Sel(s, _) => sig.generator(s.ctor).args[s.index],
        }
    }

    pub fn has_selector(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().any(Term::has_selector),
            Term::Sel(..) => true,
        }
    }

    pub fn vars_into(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => out.push(v.clone()),
            Term::App(_, args) => args.iter().for_each(|a| a.vars_into(out)),
            Term::Sel(_, t) => t.vars_into(out),
        }
    }

    pub fn substitute(&self, map: &HashMap<Var, Var>) -> Term {
        match self {
            Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            Term::App(g, args) => Term::App(*g, args.iter().map(|a| a.substitute(map)).collect()),
            Term::Sel(s, t) => Term::Sel(*s, Box::new(t.substitute(map))),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Sel(_, t) => 1 + t.size(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Fin(Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Vec<Var>, Box<Formula>),
    Forall(Vec<Var>, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn fin(t: Term) -> Formula {
        Formula::Fin(t)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: Vec<Formula>) -> Formula {
        Formula::And(fs)
    }

    pub fn or(fs: Vec<Formula>) -> Formula {
        Formula::Or(fs)
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(vs: Vec<Var>, f: Formula) -> Formula {
        if vs.is_empty() {
            f
        } else {
            Formula::Exists(vs, Box::new(f))
        }
    }

    pub fn forall(vs: Vec<Var>, f: Formula) -> Formula {
        if vs.is_empty() {
            f
        } else {
            Formula::Forall(vs, Box::new(f))
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            Formula::Eq(..) | Formula::Fin(_) | Formula::True | Formula::False
        )
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False => 1,
            Formula::Eq(a, b) => 1 + a.size() + b.size(),
            Formula::Fin(t) => 1 + t.size(),
            Formula::Not(f) => 1 + f.size(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => 1 + a.size() + b.size(),
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => 1 + vs.len() + f.size(),
        }
    }

    pub fn has_selector(&self) -> bool {
        let mut found = false;
        self.visit_terms(&mut |t| found |= t.has_selector());
        found
    }

    pub fn has_quantifier(&self) -> bool {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => true,
            Formula::Not(f) => f.has_quantifier(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::has_quantifier),
            Formula::Implies(a, b) | Formula::Iff(a, b) => a.has_quantifier() || b.has_quantifier(),
            _ => false,
        }
    }

    pub fn has_fin(&self) -> bool {
        match self {
            Formula::Fin(_) => true,
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.has_fin(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::has_fin),
            Formula::Implies(a, b) | Formula::Iff(a, b) => a.has_fin() || b.has_fin(),
            _ => false,
        }
    }

    /// Calls `f` on every top-level term of every atom.
    pub fn visit_terms(&self, f: &mut dyn FnMut(&Term)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) => {
                f(a);
                f(b);
            }
            Formula::Fin(t) => f(t),
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit_terms(f),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.visit_terms(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_var_names(&self) -> HashSet<String> {
        let mut out = HashSet::new();
        self.all_vars_rec(&mut out);
        out
    }

    fn all_vars_rec(&self, out: &mut HashSet<String>) {
        if let Formula::Exists(vs, _) | Formula::Forall(vs, _) = self {
            out.extend(vs.iter().map(|v| v.name().to_string()));
        }
        let mut vs = Vec::new();
        match self {
            Formula::Exists(_, g) | Formula::Forall(_, g) | Formula::Not(g) => g.all_vars_rec(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.all_vars_rec(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.all_vars_rec(out);
                b.all_vars_rec(out);
            }
            Formula::Eq(a, b) => {
                a.vars_into(&mut vs);
                b.vars_into(&mut vs);
            }
            Formula::Fin(t) => t.vars_into(&mut vs),
            Formula::True | Formula::False => {}
        }
        out.extend(vs.into_iter().map(|v| v.name().to_string()));
    }

    /// Capture-avoiding only in the sense that bound occurrences of the keys are
    /// left alone; callers pick fresh targets.
    pub fn substitute(&self, map: &HashMap<Var, Var>) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Eq(a, b) => Formula::Eq(a.substitute(map), b.substitute(map)),
            Formula::Fin(t) => Formula::Fin(t.substitute(map)),
            Formula::Not(f) => Formula::not(f.substitute(map)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(map)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(map)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map), b.substitute(map)),
            Formula::Iff(a, b) => Formula::iff(a.substitute(map), b.substitute(map)),
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let mut inner = map.clone();
                for v in vs {
                    inner.remove(v);
                }
                let body = Box::new(f.substitute(&inner));
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(vs.clone(), body)
                } else {
                    Formula::Forall(vs.clone(), body)
                }
            }
        }
    }
}

/// Free variables in order of first occurrence.
pub fn free_variables(f: &Formula) -> Vec<Var> {
    fn go(f: &Formula, bound: &mut Vec<Var>, seen: &mut HashSet<Var>, out: &mut Vec<Var>) {
        let term = |t: &Term, bound: &Vec<Var>, seen: &mut HashSet<Var>, out: &mut Vec<Var>| {
            let mut vs = Vec::new();
            t.vars_into(&mut vs);
            for v in vs {
                if !bound.contains(&v) && seen.insert(v.clone()) {
                    out.push(v);
                }
            }
        };
        match f {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) => {
                term(a, bound, seen, out);
                term(b, bound, seen, out);
            }
            Formula::Fin(t) => term(t, bound, seen, out),
            Formula::Not(g) => go(g, bound, seen, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| go(g, bound, seen, out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                go(a, bound, seen, out);
                go(b, bound, seen, out);
            }
            Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                go(g, bound, seen, out);
                bound.truncate(n);
            }
        }
    }
    let mut out = Vec::new();
    go(f, &mut Vec::new(), &mut HashSet::new(), &mut out);
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SortError {
    #[error("equation between sort `{left}` and sort `{right}`")]
    Mismatch { left: String, right: String },
    #[error("generator `{name}` expects {expected} arguments, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("argument {index} of `{name}` has sort `{got}`, expected `{expected}`")]
    Argument {
        name: String,
        index: usize,
        expected: String,
        got: String,
    },
}

/// Checks that every application and equation is well sorted.
pub fn check_sorts(f: &Formula, sig: &Signature) -> Result<(), SortError> {
    fn term(t: &Term, sig: &Signature) -> Result<(), SortError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(g, args) => {
                let gen = sig.generator(*g);
                if gen.args.len() != args.len() {
                    return Err(SortError::Arity {
                        name: gen.name.clone(),
                        expected: gen.args.len(),
                        got: args.len(),
                    });
                }
                for (i, (a, s)) in args.iter().zip(&gen.args).enumerate() {
                    term(a, sig)?;
                    let got = a.sort(sig);
                    if got != *s {
                        return Err(SortError::Argument {
                            name: gen.name.clone(),
                            index: i + 1,
                            expected: sig.sort_name(*s).into(),
                            got: sig.sort_name(got).into(),
                        });
                    }
                }
                Ok(())
            }
            Term::Sel(s, inner) => {
                term(inner, sig)?;
                let gen = sig.generator(s.ctor);
                let got = inner.sort(sig);
                if got != gen.result {
                    return Err(SortError::Argument {
                        name: gen.name.clone(),
                        index: s.index + 1,
                        expected: sig.sort_name(gen.result).into(),
                        got: sig.sort_name(got).into(),
                    });
                }
                Ok(())
            }
        }
    }
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Eq(a, b) => {
            term(a, sig)?;
            term(b, sig)?;
            let (sa, sb) = (a.sort(sig), b.sort(sig));
            if sa != sb {
                return Err(SortError::Mismatch {
                    left: sig.sort_name(sa).into(),
                    right: sig.sort_name(sb).into(),
                });
            }
            Ok(())
        }
        Formula::Fin(t) => term(t, sig),
        Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => check_sorts(g, sig),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(|g| check_sorts(g, sig)),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            check_sorts(a, sig)?;
            check_sorts(b, sig)
        }
    }
}

/// Source of variable names that cannot clash with any name in the inputs it
/// was told about.
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    next: u64,
}

impl FreshNames {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn avoiding(f: &Formula) -> Self {
        let mut fresh = Self::new();
        for n in f.all_var_names() {
            fresh.observe(&n);
        }
        fresh
    }

    /// Makes sure later names differ from `name`.
    pub fn observe(&mut self, name: &str) {
        let digits: String = name
            .chars()
            .rev()
            .take_while(|c| c.is_ascii_digit())
            .collect();
        if digits.is_empty() {
            return;
        }
        let digits: String = digits.chars().rev().collect();
        if let Ok(n) = digits.parse::<u64>() {
            self.next = self.next.max(n.saturating_add(1));
        }
    }

    pub fn var(&mut self, sort: SortId) -> Var {
        self.named("_v", sort)
    }

    pub fn named(&mut self, prefix: &str, sort: SortId) -> Var {
        let n = self.next;
        self.next += 1;
        Var::new(format!("{prefix}{n}"), sort)
    }
}

// ---------------------------------------------------------------------------
// Rendering

pub fn term_to_sexpr(t: &Term, sig: &Signature) -> String {
    let mut s = String::new();
    write_term(&mut s, t, sig, false);
    s
}

pub fn term_to_pretty(t: &Term, sig: &Signature) -> String {
    let mut s = String::new();
    write_term(&mut s, t, sig, true);
    s
}

fn write_term(out: &mut String, t: &Term, sig: &Signature, pretty: bool) {
    match t {
        Term::Var(v) => out.push_str(v.name()),
        Term::App(g, args) if args.is_empty() => out.push_str(sig.gen_name(*g)),
        Term::App(g, args) => {
            if pretty {
                out.push_str(sig.gen_name(*g));
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_term(out, a, sig, pretty);
                }
                out.push(')');
            } else {
                out.push('(');
                out.push_str(sig.gen_name(*g));
                for a in args {
                    out.push(' ');
                    write_term(out, a, sig, pretty);
                }
                out.push(')');
            }
        }
        Term::Sel(s, inner) => {
            let name = selector_display_name(*s, sig);
            if pretty {
                let _ = write!(out, "{name}(");
                write_term(out, inner, sig, pretty);
                out.push(')');
            } else {
                let _ = write!(out, "({name} ");
                write_term(out, inner, sig, pretty);
                out.push(')');
            }
        }
    }
}

/// Selectors render as `ctor#i` (1-based) unless a frontend supplies names.
pub fn selector_display_name(s: Selector, sig: &Signature) -> String {
    format!("{}#{}", sig.gen_name(s.ctor), s.index + 1)
}

pub fn to_sexpr(f: &Formula, sig: &Signature) -> String {
    let mut s = String::new();
    write_sexpr(&mut s, f, sig);
    s
}

fn write_binders(out: &mut String, vs: &[Var], sig: &Signature) {
    out.push('(');
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({} {})", v.name(), sig.sort_name(v.sort()));
    }
    out.push(')');
}

fn write_sexpr(out: &mut String, f: &Formula, sig: &Signature) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Eq(a, b) => {
            out.push_str("(= ");
            write_term(out, a, sig, false);
            out.push(' ');
            write_term(out, b, sig, false);
            out.push(')');
        }
        Formula::Fin(t) => {
            out.push_str("(fin ");
            write_term(out, t, sig, false);
            out.push(')');
        }
        Formula::Not(g) => {
            out.push_str("(not ");
            write_sexpr(out, g, sig);
            out.push(')');
        }
        Formula::And(fs) | Formula::Or(fs) => {
            out.push_str(if matches!(f, Formula::And(_)) {
                "(and"
            } else {
                "(or"
            });
            for g in fs {
                out.push(' ');
                write_sexpr(out, g, sig);
            }
            out.push(')');
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            out.push_str(if matches!(f, Formula::Implies(..)) {
                "(=> "
            } else {
                "(<=> "
            });
            write_sexpr(out, a, sig);
            out.push(' ');
            write_sexpr(out, b, sig);
            out.push(')');
        }
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            out.push_str(if matches!(f, Formula::Exists(..)) {
                "(exists "
            } else {
                "(forall "
            });
            write_binders(out, vs, sig);
            out.push(' ');
            write_sexpr(out, g, sig);
            out.push(')');
        }
    }
}

/// Infix rendering with unicode connectives, for humans.
pub fn to_pretty(f: &Formula, sig: &Signature) -> String {
    let mut s = String::new();
    write_pretty(&mut s, f, sig, 0);
    s
}

fn write_pretty(out: &mut String, f: &Formula, sig: &Signature, prec: u8) {
    // precedences: 0 top, 1 iff/implies, 2 or, 3 and, 4 unary
    let wrap = |out: &mut String, mine: u8, body: &dyn Fn(&mut String)| {
        if mine < prec {
            out.push('(');
            body(out);
            out.push(')');
        } else {
            body(out);
        }
    };
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Eq(a, b) => {
            if prec >= 4 {
                out.push('(');
            }
            write_term(out, a, sig, true);
            out.push_str(" = ");
            write_term(out, b, sig, true);
            if prec >= 4 {
                out.push(')');
            }
        }
        Formula::Fin(t) => {
            out.push_str("fin(");
            write_term(out, t, sig, true);
            out.push(')');
        }
        Formula::Not(g) => {
            out.push('¬');
            write_pretty(out, g, sig, 4);
        }
        Formula::And(fs) | Formula::Or(fs) => {
            let (mine, sep, empty) = if matches!(f, Formula::And(_)) {
                (3, " ∧ ", "true")
            } else {
                (2, " ∨ ", "false")
            };
            if fs.is_empty() {
                out.push_str(empty);
                return;
            }
            wrap(out, mine, &|out| {
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    write_pretty(out, g, sig, mine + 1);
                }
            });
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let sep = if matches!(f, Formula::Implies(..)) {
                " → "
            } else {
                " ↔ "
            };
            wrap(out, 1, &|out| {
                write_pretty(out, a, sig, 2);
                out.push_str(sep);
                write_pretty(out, b, sig, 2);
            });
        }
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            let q = if matches!(f, Formula::Exists(..)) {
                '∃'
            } else {
                '∀'
            };
            wrap(out, 1, &|out| {
                out.push(q);
                let names: Vec<_> = vs
                    .iter()
                    .map(|v| format!("{}:{}", v.name(), sig.sort_name(v.sort())))
                    .collect();
                out.push_str(&names.join(","));
                out.push_str(". ");
                write_pretty(out, g, sig, 1);
            });
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical form

/// Alpha-renames bound variables to `_v0, _v1, ...` in traversal order and
/// sorts the conjuncts of every conjunction and the disjuncts of every
/// disjunction by a structural key. Idempotent.
pub fn canonicalize(f: &Formula, sig: &Signature) -> Formula {
    // Bound names are first replaced by depth/position names that do not depend
    // on sibling order, so sorting gives the same result on every pass.
    let positional = rename_positional(f, 0, &HashMap::new());
    let sorted = sort_structurally(&positional, sig);
    let mut counter = 0usize;
    rename_sequential(&sorted, &HashMap::new(), &mut counter)
}

fn rename_positional(f: &Formula, depth: usize, map: &HashMap<Var, Var>) -> Formula {
    match f {
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            let mut inner = map.clone();
            let new: Vec<Var> = vs
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let nv = Var::new(format!("#{depth}.{i}"), v.sort());
                    inner.insert(v.clone(), nv.clone());
                    nv
                })
                .collect();
            let body = Box::new(rename_positional(g, depth + 1, &inner));
            if matches!(f, Formula::Exists(..)) {
                Formula::Exists(new, body)
            } else {
                Formula::Forall(new, body)
            }
        }
        Formula::Not(g) => Formula::not(rename_positional(g, depth, map)),
        Formula::And(fs) => Formula::And(
            fs.iter()
                .map(|g| rename_positional(g, depth, map))
                .collect(),
        ),
        Formula::Or(fs) => Formula::Or(
            fs.iter()
                .map(|g| rename_positional(g, depth, map))
                .collect(),
        ),
        Formula::Implies(a, b) => Formula::implies(
            rename_positional(a, depth, map),
            rename_positional(b, depth, map),
        ),
        Formula::Iff(a, b) => Formula::iff(
            rename_positional(a, depth, map),
            rename_positional(b, depth, map),
        ),
        atom => atom.substitute(map),
    }
}

fn sort_structurally(f: &Formula, sig: &Signature) -> Formula {
    match f {
        Formula::And(fs) | Formula::Or(fs) => {
            let mut items: Vec<(bool, String, Formula)> = fs
                .iter()
                .map(|g| {
                    let g = sort_structurally(g, sig);
                    (!g.is_atom(), to_sexpr(&g, sig), g)
                })
                .collect();
            items.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
            let items = items.into_iter().map(|x| x.2).collect();
            if matches!(f, Formula::And(_)) {
                Formula::And(items)
            } else {
                Formula::Or(items)
            }
        }
        Formula::Not(g) => Formula::not(sort_structurally(g, sig)),
        Formula::Implies(a, b) => {
            Formula::implies(sort_structurally(a, sig), sort_structurally(b, sig))
        }
        Formula::Iff(a, b) => Formula::iff(sort_structurally(a, sig), sort_structurally(b, sig)),
        Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(sort_structurally(g, sig))),
        Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(sort_structurally(g, sig))),
        atom => atom.clone(),
    }
}

fn rename_sequential(f: &Formula, map: &HashMap<Var, Var>, counter: &mut usize) -> Formula {
    match f {
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            let mut inner = map.clone();
            let new: Vec<Var> = vs
                .iter()
                .map(|v| {
                    let nv = Var::new(format!("_v{}", *counter), v.sort());
                    *counter += 1;
                    inner.insert(v.clone(), nv.clone());
                    nv
                })
                .collect();
            let body = Box::new(rename_sequential(g, &inner, counter));
            if matches!(f, Formula::Exists(..)) {
                Formula::Exists(new, body)
            } else {
                Formula::Forall(new, body)
            }
        }
        Formula::Not(g) => Formula::not(rename_sequential(g, map, counter)),
        Formula::And(fs) => Formula::And(
            fs.iter()
                .map(|g| rename_sequential(g, map, counter))
                .collect(),
        ),
        Formula::Or(fs) => Formula::Or(
            fs.iter()
                .map(|g| rename_sequential(g, map, counter))
                .collect(),
        ),
        Formula::Implies(a, b) => {
            let a = rename_sequential(a, map, counter);
            Formula::implies(a, rename_sequential(b, map, counter))
        }
        Formula::Iff(a, b) => {
            let a = rename_sequential(a, map, counter);
            Formula::iff(a, rename_sequential(b, map, counter))
        }
        atom => atom.substitute(map),
    }
}
