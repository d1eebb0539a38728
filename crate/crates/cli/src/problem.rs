//! The problem file format: declarations, assertions and one command.

use std::collections::HashMap;

use thiserror::Error;
use treetheory::datatypes::{
    check_declarations, ConstructorDecl, DatatypeDecl, DatatypeKind, DatatypeSignature,
    DefaultValueTable,
};
use treetheory::formula::Selector;
use treetheory::oracle::RationalTree;
use treetheory::signature::{is_reserved_name, SignatureError};
use treetheory::{Formula, Signature, SortId, Term, Var};

use crate::sexpr::{read_all, read_one, Pos, SExpr, SyntaxError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simplify,
    CheckSat,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub sig: Signature,
    /// Present when the declarations were datatypes or codatatypes.
    pub datatypes: Option<DatatypeSignature>,
    pub consts: Vec<Var>,
    /// Explicit defaults from `define-default`.
    pub defaults: DefaultValueTable,
    pub assertions: Vec<Formula>,
    pub command: Command,
}

impl Problem {
    /// The conjunction of all assertions.
    pub fn formula(&self) -> Formula {
        Formula::and(self.assertions.clone())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("{pos}: parse error: expected {expected}")]
    Parse { pos: Pos, expected: String },
    #[error("{pos}: sort error: {message}")]
    Sort { pos: Pos, message: String },
    #[error("{pos}: arity error: `{name}` takes {expected} argument(s), got {got}")]
    Arity {
        pos: Pos,
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("{pos}: {message}")]
    Declaration { pos: Pos, message: String },
}

impl From<SyntaxError> for ProblemError {
    fn from(e: SyntaxError) -> Self {
        ProblemError::Parse {
            pos: e.pos,
            expected: e.expected,
        }
    }
}

impl ProblemError {
    pub fn pos(&self) -> Pos {
        match self {
            ProblemError::Parse { pos, .. }
            | ProblemError::Sort { pos, .. }
            | ProblemError::Arity { pos, .. }
            | ProblemError::Declaration { pos, .. } => *pos,
        }
    }
}

fn expected(e: &SExpr, what: &str) -> ProblemError {
    ProblemError::Parse {
        pos: e.pos(),
        expected: what.to_string(),
    }
}

fn atom<'a>(e: &'a SExpr, what: &str) -> Result<&'a str, ProblemError> {
    e.as_atom()
        .filter(|a| !a.is_empty())
        .ok_or_else(|| expected(e, what))
}

fn list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], ProblemError> {
    e.as_list().ok_or_else(|| expected(e, what))
}

fn args_exactly<'a>(
    items: &'a [SExpr],
    n: usize,
    pos: Pos,
    what: &str,
) -> Result<&'a [SExpr], ProblemError> {
    if items.len() != n + 1 {
        return Err(ProblemError::Parse {
            pos,
            expected: format!("{n} argument(s) to {what}"),
        });
    }
    Ok(&items[1..])
}

/// Names and positions of declared sorts and generators, used to attach a
/// position to signature errors.
#[derive(Default)]
struct Positions(HashMap<String, Pos>);

impl Positions {
    fn of(&self, e: &SignatureError, fallback: Pos) -> Pos {
        let name = match e {
            SignatureError::SingularSort(n)
            | SignatureError::EmptySort(n)
            | SignatureError::UnknownSort(n)
            | SignatureError::DuplicateSort(n)
            | SignatureError::DuplicateGenerator(n)
            | SignatureError::ReservedName(n) => n,
        };
        self.0.get(name).copied().unwrap_or(fallback)
    }
}

pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    let items = read_all(text)?;
    let mut tree_decls: Vec<&SExpr> = Vec::new();
    let mut data_decls: Vec<DatatypeDecl> = Vec::new();
    let mut positions = Positions::default();
    let mut rest: Vec<&SExpr> = Vec::new();
    let mut first_decl: Option<Pos> = None;
    for e in &items {
        let items = list(e, "a command")?;
        let head = items
            .first()
            .map(|h| atom(h, "a command name"))
            .transpose()?
            .ok_or_else(|| expected(e, "a command"))?;
        match head {
            "declare-sort" | "declare-gen" | "declare-datatype" | "declare-codatatype" => {
                if let Some(later) = rest.first() {
                    return Err(ProblemError::Parse {
                        pos: e.pos(),
                        expected: format!(
                            "declarations before the first assertion or command at {}",
                            later.pos()
                        ),
                    });
                }
                first_decl.get_or_insert(e.pos());
                if head.starts_with("declare-sort") || head == "declare-gen" {
                    if !data_decls.is_empty() {
                        return Err(ProblemError::Parse {
                            pos: e.pos(),
                            expected: "datatype declarations only; tree sorts and datatypes cannot be mixed".into(),
                        });
                    }
                    let name = atom(items.get(1).ok_or_else(|| expected(e, "a name"))?, "a name")?;
                    positions.0.entry(name.to_string()).or_insert(e.pos());
                    tree_decls.push(e);
                } else {
                    if !tree_decls.is_empty() {
                        return Err(ProblemError::Parse {
                            pos: e.pos(),
                            expected:
                                "tree declarations only; tree sorts and datatypes cannot be mixed"
                                    .into(),
                        });
                    }
                    data_decls.push(datatype_decl(e, items, &mut positions)?);
                }
            }
            _ => rest.push(e),
        }
    }
    let fallback = first_decl.unwrap_or(Pos { line: 1, col: 1 });
    let (sig, datatypes) = if data_decls.is_empty() {
        (tree_signature(&tree_decls, &positions)?, None)
    } else {
        let dsig = check_declarations(&data_decls).map_err(|err| {
            let pos = match &err {
                treetheory::datatypes::DatatypeError::Signature(s) => positions.of(s, fallback),
                treetheory::datatypes::DatatypeError::NonWellFounded(n)
                | treetheory::datatypes::DatatypeError::NoConstructors(n) => {
                    positions.0.get(n).copied().unwrap_or(fallback)
                }
                _ => fallback,
            };
            ProblemError::Declaration {
                pos,
                message: err.to_string(),
            }
        })?;
        (dsig.sig.clone(), Some(dsig))
    };
    sig.validate().map_err(|err| ProblemError::Declaration {
        pos: positions.of(&err, fallback),
        message: err.to_string(),
    })?;

    let mut ctx = Context {
        sig: &sig,
        datatypes: datatypes.as_ref(),
        consts: Vec::new(),
    };
    let mut defaults = DefaultValueTable::new();
    let mut assertions = Vec::new();
    let mut command: Option<(Command, Pos)> = None;
    for e in rest {
        let items = e.as_list().unwrap();
        let head = items[0].as_atom().unwrap();
        if let Some((_, at)) = command {
            return Err(ProblemError::Parse {
                pos: e.pos(),
                expected: format!("nothing after the command at {at}"),
            });
        }
        match head {
            "declare-const" => {
                let args = args_exactly(items, 2, e.pos(), "declare-const")?;
                let name = atom(&args[0], "a constant name")?;
                if is_reserved_name(name) {
                    return Err(ProblemError::Declaration {
                        pos: args[0].pos(),
                        message: format!("name `{name}` uses a reserved prefix"),
                    });
                }
                if sig.generator_by_name(name).is_some()
                    || ctx.consts.iter().any(|v| v.name() == name)
                {
                    return Err(ProblemError::Declaration {
                        pos: args[0].pos(),
                        message: format!("`{name}` declared twice"),
                    });
                }
                let s = ctx.sort(&args[1])?;
                ctx.consts.push(Var::new(name, s));
            }
            "define-default" => {
                let args = args_exactly(items, 3, e.pos(), "define-default")?;
                let Some(dsig) = datatypes.as_ref() else {
                    return Err(ProblemError::Declaration {
                        pos: e.pos(),
                        message: "define-default needs datatype declarations".into(),
                    });
                };
                let cname = atom(&args[0], "a constructor")?;
                let ctor = sig
                    .generator_by_name(cname)
                    .ok_or_else(|| expected(&args[0], "a constructor"))?;
                let arity = sig.generator(ctor).arity();
                let index: usize = atom(&args[1], "a selector index")?
                    .parse()
                    .ok()
                    .filter(|i| (1..=arity).contains(i))
                    .ok_or_else(|| {
                        expected(&args[1], &format!("a selector index between 1 and {arity}"))
                    })?;
                let sel = Selector {
                    ctor,
                    index: index - 1,
                };
                let (t, _) = ctx.term(&args[2], Some(dsig.selector_sort(sel)), &mut Vec::new())?;
                let value = RationalTree::from_ground(&t)
                    .ok_or_else(|| expected(&args[2], "a ground term"))?;
                defaults
                    .insert(dsig, sel, value)
                    .map_err(|err| ProblemError::Sort {
                        pos: args[2].pos(),
                        message: err.to_string(),
                    })?;
            }
            "assert" => {
                let args = args_exactly(items, 1, e.pos(), "assert")?;
                assertions.push(ctx.formula(&args[0], &mut Vec::new())?);
            }
            "simplify" | "check-sat" => {
                args_exactly(items, 0, e.pos(), head)?;
                let c = if head == "simplify" {
                    Command::Simplify
                } else {
                    Command::CheckSat
                };
                command = Some((c, e.pos()));
            }
            other => {
                return Err(expected(
                    &items[0],
                    &format!("a known command, found `{other}`"),
                ))
            }
        }
    }
    let end = items
        .last()
        .map(SExpr::pos)
        .unwrap_or(Pos { line: 1, col: 1 });
    let (command, _) = command.ok_or(ProblemError::Parse {
        pos: end,
        expected: "a (simplify) or (check-sat) command".into(),
    })?;
    let consts = ctx.consts;
    Ok(Problem {
        sig,
        datatypes,
        consts,
        defaults,
        assertions,
        command,
    })
}

fn tree_signature(decls: &[&SExpr], positions: &Positions) -> Result<Signature, ProblemError> {
    let mut b = Signature::builder();
    let mut fallback = Pos { line: 1, col: 1 };
    for e in decls {
        fallback = e.pos();
        let items = e.as_list().unwrap();
        match items[0].as_atom().unwrap() {
            "declare-sort" => {
                let args = args_exactly(items, 1, e.pos(), "declare-sort")?;
                let name = atom(&args[0], "a sort name")?;
                if b.has_sort(name) {
                    return Err(ProblemError::Declaration {
                        pos: e.pos(),
                        message: format!("sort `{name}` declared twice"),
                    });
                }
                b.sort(name);
            }
            _ => {
                let args = args_exactly(items, 3, e.pos(), "declare-gen")?;
                let name = atom(&args[0], "a generator name")?;
                if b.has_generator(name) {
                    return Err(ProblemError::Declaration {
                        pos: e.pos(),
                        message: format!("generator `{name}` declared twice"),
                    });
                }
                let mut sorts = Vec::new();
                for a in list(&args[1], "a list of argument sorts")? {
                    let s = atom(a, "a sort name")?;
                    if !b.has_sort(s) {
                        return Err(ProblemError::Sort {
                            pos: a.pos(),
                            message: format!("unknown sort `{s}`"),
                        });
                    }
                    sorts.push(s.to_string());
                }
                let result = atom(&args[2], "a result sort")?;
                if !b.has_sort(result) {
                    return Err(ProblemError::Sort {
                        pos: args[2].pos(),
                        message: format!("unknown sort `{result}`"),
                    });
                }
                b.generator_owned(name.to_string(), sorts, result.to_string());
            }
        }
    }
    b.build().map_err(|err| ProblemError::Declaration {
        pos: positions.of(&err, fallback),
        message: err.to_string(),
    })
}

fn datatype_decl(
    e: &SExpr,
    items: &[SExpr],
    positions: &mut Positions,
) -> Result<DatatypeDecl, ProblemError> {
    let kind = if items[0].as_atom() == Some("declare-datatype") {
        DatatypeKind::Datatype
    } else {
        DatatypeKind::Codatatype
    };
    let args = args_exactly(items, 2, e.pos(), "a (co)datatype declaration")?;
    let name = atom(&args[0], "a datatype name")?;
    positions.0.entry(name.to_string()).or_insert(e.pos());
    let mut constructors = Vec::new();
    for c in list(&args[1], "a list of constructors")? {
        let (cname, fields) = match c {
            SExpr::Atom(..) => (atom(c, "a constructor")?, &[][..]),
            SExpr::List(parts, _) => {
                let first = parts.first().ok_or_else(|| expected(c, "a constructor"))?;
                (atom(first, "a constructor name")?, &parts[1..])
            }
        };
        positions.0.entry(cname.to_string()).or_insert(c.pos());
        let mut fs = Vec::new();
        for f in fields {
            let pair = list(f, "a (selector sort) pair")?;
            if pair.len() != 2 {
                return Err(expected(f, "a (selector sort) pair"));
            }
            let sel = atom(&pair[0], "a selector name")?;
            positions.0.entry(sel.to_string()).or_insert(f.pos());
            fs.push((sel.to_string(), atom(&pair[1], "a sort name")?.to_string()));
        }
        constructors.push(ConstructorDecl {
            name: cname.to_string(),
            fields: fs,
        });
    }
    Ok(DatatypeDecl {
        name: name.to_string(),
        kind,
        constructors,
    })
}

/// Names in scope while reading formulae.
pub struct Context<'a> {
    pub sig: &'a Signature,
    pub datatypes: Option<&'a DatatypeSignature>,
    pub consts: Vec<Var>,
}

impl<'a> Context<'a> {
    pub fn new(
        sig: &'a Signature,
        datatypes: Option<&'a DatatypeSignature>,
        consts: Vec<Var>,
    ) -> Self {
        Context {
            sig,
            datatypes,
            consts,
        }
    }

    fn sort(&self, e: &SExpr) -> Result<SortId, ProblemError> {
        let name = atom(e, "a sort name")?;
        self.sig.sort(name).ok_or_else(|| ProblemError::Sort {
            pos: e.pos(),
            message: format!("unknown sort `{name}`"),
        })
    }

    fn lookup(&self, name: &str, scope: &[Var]) -> Option<Var> {
        scope
            .iter()
            .rev()
            .chain(self.consts.iter().rev())
            .find(|v| v.name() == name)
            .cloned()
    }

    pub fn formula(&self, e: &SExpr, scope: &mut Vec<Var>) -> Result<Formula, ProblemError> {
        let items = match e {
            SExpr::Atom(a, _) if a == "true" => return Ok(Formula::True),
            SExpr::Atom(a, _) if a == "false" => return Ok(Formula::False),
            SExpr::Atom(..) => return Err(expected(e, "a formula")),
            SExpr::List(items, _) => items,
        };
        let head = items
            .first()
            .and_then(SExpr::as_atom)
            .ok_or_else(|| expected(e, "a formula"))?;
        let pos = e.pos();
        match head {
            "=" => {
                let args = args_exactly(items, 2, pos, "=")?;
                let (a, s) = self.term(&args[0], None, scope)?;
                let (b, _) = self.term(&args[1], Some(s), scope)?;
                Ok(Formula::eq(a, b))
            }
            "fin" => {
                let args = args_exactly(items, 1, pos, "fin")?;
                Ok(Formula::fin(self.term(&args[0], None, scope)?.0))
            }
            "not" => {
                let args = args_exactly(items, 1, pos, "not")?;
                Ok(Formula::Not(Box::new(self.formula(&args[0], scope)?)))
            }
            "and" | "or" => {
                let fs = items[1..]
                    .iter()
                    .map(|a| self.formula(a, scope))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(if head == "and" {
                    Formula::And(fs)
                } else {
                    Formula::Or(fs)
                })
            }
            "=>" | "<=>" => {
                let args = args_exactly(items, 2, pos, head)?;
                let a = Box::new(self.formula(&args[0], scope)?);
                let b = Box::new(self.formula(&args[1], scope)?);
                Ok(if head == "=>" {
                    Formula::Implies(a, b)
                } else {
                    Formula::Iff(a, b)
                })
            }
            "exists" | "forall" => {
                let args = args_exactly(items, 2, pos, head)?;
                let binders = list(&args[0], "a list of (variable sort) binders")?;
                if binders.is_empty() {
                    return Err(expected(&args[0], "at least one binder"));
                }
                let mut vs = Vec::new();
                for b in binders {
                    let pair = list(b, "a (variable sort) binder")?;
                    if pair.len() != 2 {
                        return Err(expected(b, "a (variable sort) binder"));
                    }
                    vs.push(Var::new(
                        atom(&pair[0], "a variable name")?,
                        self.sort(&pair[1])?,
                    ));
                }
                let len = scope.len();
                scope.extend(vs.iter().cloned());
                let body = self.formula(&args[1], scope);
                scope.truncate(len);
                let body = Box::new(body?);
                Ok(if head == "exists" {
                    Formula::Exists(vs, body)
                } else {
                    Formula::Forall(vs, body)
                })
            }
            _ => Err(expected(
                &items[0],
                "a connective, quantifier, `=` or `fin`",
            )),
        }
    }

    /// A term and its sort, checked against `want` when given.
    pub fn term(
        &self,
        e: &SExpr,
        want: Option<SortId>,
        scope: &mut Vec<Var>,
    ) -> Result<(Term, SortId), ProblemError> {
        let (t, s) = match e {
            SExpr::Atom(name, pos) => {
                if let Some(v) = self.lookup(name, scope) {
                    (Term::var(&v), v.sort())
                } else if let Some(g) = self.sig.generator_by_name(name) {
                    let gen = self.sig.generator(g);
                    if gen.arity() != 0 {
                        return Err(ProblemError::Arity {
                            pos: *pos,
                            name: name.clone(),
                            expected: gen.arity(),
                            got: 0,
                        });
                    }
                    (Term::constant(g), gen.result)
                } else {
                    return Err(expected(
                        e,
                        &format!("a variable or generator, found `{name}`"),
                    ));
                }
            }
            SExpr::List(items, pos) => {
                let name = items
                    .first()
                    .and_then(SExpr::as_atom)
                    .ok_or_else(|| expected(e, "a term"))?;
                if let Some(g) = self.sig.generator_by_name(name) {
                    let gen = self.sig.generator(g);
                    if gen.arity() != items.len() - 1 {
                        return Err(ProblemError::Arity {
                            pos: *pos,
                            name: name.to_string(),
                            expected: gen.arity(),
                            got: items.len() - 1,
                        });
                    }
                    let args = items[1..]
                        .iter()
                        .zip(&gen.args)
                        .map(|(a, s)| self.term(a, Some(*s), scope).map(|(t, _)| t))
                        .collect::<Result<Vec<_>, _>>()?;
                    (Term::App(g, args), gen.result)
                } else if let Some(sel) = self.datatypes.and_then(|d| d.selector(name)) {
                    if items.len() != 2 {
                        return Err(ProblemError::Arity {
                            pos: *pos,
                            name: name.to_string(),
                            expected: 1,
                            got: items.len() - 1,
                        });
                    }
                    let arg_sort = self.sig.generator(sel.ctor).result;
                    let (inner, _) = self.term(&items[1], Some(arg_sort), scope)?;
                    (
                        Term::Sel(sel, Box::new(inner)),
                        self.sig.generator(sel.ctor).args[sel.index],
                    )
                } else {
                    return Err(expected(
                        &items[0],
                        &format!("a generator or selector, found `{name}`"),
                    ));
                }
            }
        };
        if let Some(w) = want {
            if w != s {
                return Err(ProblemError::Sort {
                    pos: e.pos(),
                    message: format!(
                        "expected a term of sort {}, found one of sort {}",
                        self.sig.sort_name(w),
                        self.sig.sort_name(s)
                    ),
                });
            }
        }
        Ok((t, s))
    }
}

/// Reads a single formula, for instance one printed by the solver.
pub fn parse_formula(text: &str, ctx: &Context<'_>) -> Result<Formula, ProblemError> {
    ctx.formula(&read_one(text)?, &mut Vec::new())
}
