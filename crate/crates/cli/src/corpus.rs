//! Generated benchmark problems and problem-file rendering.

use std::fmt::Write as _;

use rand::Rng;
use treetheory::formula::to_sexpr;
use treetheory::oracle::random::{
    random_formula_with, random_signature, rng_from_seed, FormulaProfile,
};
use treetheory::{example_signature, Formula, Signature, Term, Var};

use crate::problem::Command;

/// A problem file declaring `sig` and `consts` and asserting `f`.
pub fn render_problem(sig: &Signature, consts: &[Var], f: &Formula, command: Command) -> String {
    let mut out = String::new();
    for s in sig.sorts() {
        let _ = writeln!(out, "(declare-sort {})", sig.sort_name(s));
    }
    for g in sig.generator_ids() {
        let gen = sig.generator(g);
        let args: Vec<&str> = gen.args.iter().map(|a| sig.sort_name(*a)).collect();
        let _ = writeln!(
            out,
            "(declare-gen {} ({}) {})",
            sig.gen_name(g),
            args.join(" "),
            sig.sort_name(gen.result)
        );
    }
    for c in consts {
        let _ = writeln!(
            out,
            "(declare-const {} {})",
            c.name(),
            sig.sort_name(c.sort())
        );
    }
    if *f != Formula::True {
        let _ = writeln!(out, "(assert {})", to_sexpr(f, sig));
    }
    out.push_str(match command {
        Command::Simplify => "(simplify)\n",
        Command::CheckSat => "(check-sat)\n",
    });
    out
}

struct Example {
    sig: Signature,
}

impl Example {
    fn app(&self, g: &str, args: Vec<Term>) -> Term {
        Term::App(
            self.sig.generator_by_name(g).expect("known generator"),
            args,
        )
    }

    fn c(&self, g: &str) -> Term {
        self.app(g, Vec::new())
    }

    fn var(&self, name: &str, sort: &str) -> Var {
        Var::new(name, self.sig.sort(sort).expect("known sort"))
    }

    fn succ_n(&self, n: usize, base: Term) -> Term {
        (0..n).fold(base, |t, _| self.app("succ", vec![t]))
    }

    /// Every natural number is below `k` or has `k` leading successors.
    fn nat_cases(&self, k: usize) -> Formula {
        let x = self.var("x", "nat");
        let y = self.var("y", "nat");
        let mut parts: Vec<Formula> = (0..k)
            .map(|j| Formula::not(Formula::eq(Term::var(&x), self.succ_n(j, self.c("zero")))))
            .collect();
        parts.push(Formula::not(Formula::exists(
            vec![y.clone()],
            Formula::eq(Term::var(&x), self.succ_n(k, Term::var(&y))),
        )));
        Formula::not(Formula::exists(vec![x], Formula::and(parts)))
    }

    /// The list example, with `k` nested levels of case distinction.
    fn list_cases(&self, k: usize) -> Formula {
        let x = self.var("x", "list");
        let mut parts = Vec::new();
        let mut bound = Vec::new();
        for j in 0..k {
            parts.push(Formula::not(Formula::exists(
                bound.clone(),
                Formula::eq(Term::var(&x), self.rebuild(&bound, self.c("nil"))),
            )));
            let h = self.var(&format!("h{j}"), "nat");
            bound.push(h);
        }
        let t = self.var("t", "list");
        let mut all = bound.clone();
        all.push(t.clone());
        parts.push(Formula::not(Formula::exists(
            all,
            Formula::eq(Term::var(&x), self.rebuild(&bound, Term::var(&t))),
        )));
        Formula::not(Formula::exists(vec![x], Formula::and(parts)))
    }

    fn rebuild(&self, heads: &[Var], tail: Term) -> Term {
        heads
            .iter()
            .rev()
            .fold(tail, |t, h| self.app("cons", vec![Term::var(h), t]))
    }

    /// Every infinite `t` tree other than those named by the constants.
    fn infinite_t(&self, consts: &[Var]) -> Formula {
        let x = self.var("x", "t");
        let mut parts = vec![Formula::not(Formula::fin(Term::var(&x)))];
        parts.extend(
            consts
                .iter()
                .map(|c| Formula::not(Formula::eq(Term::var(&x), Term::var(c)))),
        );
        Formula::not(Formula::exists(vec![x], Formula::and(parts)))
    }

    /// For all `k` booleans there is one different from the first.
    fn bool_choice(&self, k: usize) -> Formula {
        let bs: Vec<Var> = (0..k).map(|i| self.var(&format!("b{i}"), "bool")).collect();
        let c = self.var("c", "bool");
        let mut parts = vec![Formula::not(Formula::eq(Term::var(&c), Term::var(&bs[0])))];
        parts.extend(
            bs[1..]
                .iter()
                .map(|b| Formula::eq(Term::var(b), Term::var(b))),
        );
        Formula::forall(bs, Formula::exists(vec![c], Formula::and(parts)))
    }

    /// A finite `d` value avoiding the given `c1` trees.
    fn finite_d(&self, x: &Var, avoid: &[&str]) -> Formula {
        let mut parts = vec![Formula::fin(Term::var(x))];
        parts.extend(
            avoid
                .iter()
                .map(|b| Formula::not(Formula::eq(Term::var(x), self.app("c1", vec![self.c(b)])))),
        );
        Formula::and(parts)
    }
}

/// Hand-written families, each scaled a few times, covering every
/// instantiation condition.
fn families() -> Vec<(String, Vec<Var>, Formula, Command)> {
    let f = Example {
        sig: example_signature(),
    };
    let mut out = Vec::new();
    for k in 1..=4 {
        out.push((
            format!("nat_cases_{k}"),
            Vec::new(),
            f.nat_cases(k),
            Command::Simplify,
        ));
        out.push((
            format!("list_cases_{k}"),
            Vec::new(),
            f.list_cases(k),
            Command::Simplify,
        ));
    }
    for k in 1..=3 {
        let consts: Vec<Var> = (0..k).map(|i| f.var(&format!("y{i}"), "t")).collect();
        let g = f.infinite_t(&consts);
        out.push((format!("infinite_t_{k}"), consts, g, Command::Simplify));
    }
    for k in 1..=3 {
        out.push((
            format!("bool_choice_{k}"),
            Vec::new(),
            f.bool_choice(k),
            Command::Simplify,
        ));
    }
    let x = f.var("x", "d");
    out.push((
        "finite_d_0".into(),
        vec![x.clone()],
        f.finite_d(&x, &[]),
        Command::Simplify,
    ));
    out.push((
        "finite_d_1".into(),
        vec![x.clone()],
        f.finite_d(&x, &["true"]),
        Command::Simplify,
    ));
    out.push((
        "finite_d_2".into(),
        vec![x.clone()],
        f.finite_d(&x, &["true", "false"]),
        Command::CheckSat,
    ));
    for k in 1..=3 {
        let ys: Vec<Var> = (0..k).map(|i| f.var(&format!("y{i}"), "d")).collect();
        let mut parts = vec![Formula::fin(Term::var(&x))];
        parts.extend(
            ys.iter()
                .map(|y| Formula::not(Formula::eq(Term::var(&x), Term::var(y)))),
        );
        let mut consts = vec![x.clone()];
        consts.extend(ys);
        out.push((
            format!("finite_d_distinct_{k}"),
            consts,
            Formula::and(parts),
            Command::Simplify,
        ));
    }
    let e = Formula::exists(vec![x.clone()], f.finite_d(&x, &["false"]));
    out.push(("finite_d_exists".into(), Vec::new(), e, Command::Simplify));
    out
}

/// `count` problem files (at least the hand-written families), named and
/// ready to write. Deterministic in `seed`.
pub fn generate_corpus(seed: u64, count: usize) -> Vec<(String, String)> {
    let sig = example_signature();
    let mut out: Vec<(String, String)> = families()
        .into_iter()
        .map(|(name, consts, f, cmd)| {
            (
                format!("{name}.tree"),
                render_problem(&sig, &consts, &f, cmd),
            )
        })
        .collect();
    let mut rng = rng_from_seed(seed);
    let sorts: Vec<_> = sig.sorts().collect();
    let mut i = 0;
    while out.len() < count {
        let (psig, random_sig) = if i % 3 == 2 {
            (random_signature(&mut rng), true)
        } else {
            (sig.clone(), false)
        };
        let psorts: Vec<_> = if random_sig {
            psig.sorts().collect()
        } else {
            sorts.clone()
        };
        let n = rng.gen_range(0..=2);
        let consts: Vec<Var> = (0..n)
            .map(|k| Var::new(format!("x{k}"), psorts[rng.gen_range(0..psorts.len())]))
            .collect();
        let profile = FormulaProfile {
            quantifier_depth: rng.gen_range(1..=3),
            max_atoms: rng.gen_range(3..=8),
            term_depth: rng.gen_range(1..=2),
            free: consts.clone(),
            ..Default::default()
        };
        let f = random_formula_with(&mut rng, &psig, &profile);
        let cmd = if rng.gen_bool(0.3) {
            Command::CheckSat
        } else {
            Command::Simplify
        };
        let kind = if random_sig { "random_sig" } else { "random" };
        out.push((
            format!("{kind}_{i:03}.tree"),
            render_problem(&psig, &consts, &f, cmd),
        ));
        i += 1;
    }
    out
}
