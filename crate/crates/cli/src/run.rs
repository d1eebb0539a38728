//! Running a parsed problem through the solver and rendering the result.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;
use treetheory::analysis::AnalysisReport;
use treetheory::basic::RuleCounts;
use treetheory::datatypes::{
    eliminate_selectors_default, eliminate_selectors_standard, embed_in_trees, DatatypeError,
};
use treetheory::formula::{to_pretty, to_sexpr};
use treetheory::oracle::enumerate::default_trees;
use treetheory::oracle::extract_model;
use treetheory::signature::SignatureError;
use treetheory::solver::{SolveError, DEFAULT_STEP_BUDGET};
use treetheory::{
    free_variables, Formula, SolveOutcome, Solver, SolverConfig, SortAnalysis, Term, Var,
};

use crate::problem::{Command, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Solve the assertions directly in the theory of trees.
    Trees,
    /// Eliminate selectors and restrict datatype variables to finite trees first.
    Datatypes,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Semantics {
    /// Selectors on the wrong constructor are unspecified.
    #[default]
    Standard,
    /// Selectors on the wrong constructor return a fixed default value.
    Defaults,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Pretty,
    Sexpr,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Inferred from the declarations when absent.
    pub mode: Option<Mode>,
    pub semantics: Semantics,
    pub budget: u64,
    pub timeout: Option<Duration>,
    pub print_analysis: bool,
    pub model: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            mode: None,
            semantics: Semantics::Standard,
            budget: DEFAULT_STEP_BUDGET,
            timeout: None,
            print_analysis: false,
            model: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Datatype(#[from] DatatypeError),
    #[error("selectors need datatype declarations and --mode datatypes")]
    SelectorsInTrees,
    #[error("--mode datatypes needs datatype or codatatype declarations")]
    NoDatatypes,
    #[error(transparent)]
    Solve(SolveError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    True,
    False,
    Simplified,
    Sat,
    Unsat,
    Timeout,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::True => "true",
            Status::False => "false",
            Status::Simplified => "simplified",
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::Timeout => "timeout",
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunStats {
    pub rules: RuleCounts,
    /// Instantiations per condition, in condition order.
    pub instantiations: [u64; 4],
    pub depth_reductions: u64,
    pub steps: u64,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub status: Status,
    /// The fully simplified disjuncts as s-expressions; empty unless the
    /// command was `simplify` and the result is neither true nor false.
    pub disjuncts: Vec<String>,
    #[serde(skip)]
    pub pretty_disjuncts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisReport>,
    pub stats: RunStats,
    #[serde(skip)]
    pub outcome: Option<SolveOutcome>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.status == Status::Timeout {
            2
        } else {
            0
        }
    }
}

/// The tree-theory formula handed to the solver, with its free variables in
/// solving order: the declared constants first, then any variables the
/// selector elimination introduced.
pub fn tree_formula(
    problem: &Problem,
    opts: &RunOptions,
    analysis: &SortAnalysis,
) -> Result<(Formula, Vec<Var>), RunError> {
    let f = problem.formula();
    let mode = opts.mode.unwrap_or(if problem.datatypes.is_some() {
        Mode::Datatypes
    } else {
        Mode::Trees
    });
    let mut free = problem.consts.clone();
    let input = match mode {
        Mode::Trees => {
            if f.has_selector() {
                return Err(RunError::SelectorsInTrees);
            }
            f
        }
        Mode::Datatypes => {
            let dsig = problem.datatypes.as_ref().ok_or(RunError::NoDatatypes)?;
            let g = if !f.has_selector() {
                f
            } else {
                match opts.semantics {
                    Semantics::Standard => eliminate_selectors_standard(&f, dsig)?,
                    Semantics::Defaults => {
                        let mut table = problem.defaults.clone();
                        table.fill_missing(dsig, analysis);
                        eliminate_selectors_default(&f, dsig, &table)?
                    }
                }
            };
            for v in free_variables(&g) {
                if !free.contains(&v) {
                    free.push(v);
                }
            }
            // Constants that do not occur still range over finite values.
            let occurring = free_variables(&g);
            let mut parts: Vec<Formula> = problem
                .consts
                .iter()
                .filter(|c| dsig.is_datatype(c.sort()) && !occurring.contains(c))
                .map(|c| Formula::fin(Term::var(c)))
                .collect();
            parts.push(embed_in_trees(&g, dsig));
            Formula::and(parts)
        }
    };
    Ok((input, free))
}

pub fn run(problem: &Problem, opts: &RunOptions) -> Result<Report, RunError> {
    let start = Instant::now();
    let analysis = SortAnalysis::compute(&problem.sig)?;
    let (input, free) = tree_formula(problem, opts, &analysis)?;
    let config = SolverConfig {
        max_steps: opts.budget,
        timeout: opts.timeout,
        ..Default::default()
    };
    let mut solver = Solver::new(&problem.sig, &analysis, config);
    let result = solver.solve(&input, &free);
    let s = &solver.stats;
    let mut stats = RunStats {
        rules: s.basic_rules.clone(),
        instantiations: s.instantiations,
        depth_reductions: s.depth_reductions,
        steps: s.steps,
        wall_time_ms: 0.0,
    };
    let mut report = Report {
        status: Status::Timeout,
        disjuncts: Vec::new(),
        pretty_disjuncts: Vec::new(),
        model: None,
        model_error: None,
        analysis: opts
            .print_analysis
            .then(|| analysis.to_report(&problem.sig)),
        stats: RunStats::default(),
        outcome: None,
    };
    let outcome = match result {
        Ok(o) => o,
        Err(SolveError::Timeout(_)) => {
            stats.wall_time_ms = start.elapsed().as_secs_f64() * 1000.0;
            report.stats = stats;
            return Ok(report);
        }
        Err(e) => return Err(RunError::Solve(e)),
    };
    report.status = match (problem.command, &outcome) {
        (Command::CheckSat, o) if o.is_satisfiable() => Status::Sat,
        (Command::CheckSat, _) => Status::Unsat,
        (Command::Simplify, SolveOutcome::True) => Status::True,
        (Command::Simplify, SolveOutcome::False) => Status::False,
        (Command::Simplify, SolveOutcome::Disjunction(_)) => Status::Simplified,
    };
    if let (Command::Simplify, SolveOutcome::Disjunction(ds)) = (problem.command, &outcome) {
        for d in ds {
            let f = d.to_formula();
            report.disjuncts.push(to_sexpr(&f, &problem.sig));
            report.pretty_disjuncts.push(to_pretty(&f, &problem.sig));
        }
    }
    if opts.model {
        match model(problem, &analysis, &outcome) {
            Ok(m) => report.model = m,
            Err(e) => report.model_error = Some(e),
        }
    }
    stats.wall_time_ms = start.elapsed().as_secs_f64() * 1000.0;
    report.stats = stats;
    report.outcome = Some(outcome);
    Ok(report)
}

/// Values for the declared constants, or `None` when there is no model.
fn model(
    problem: &Problem,
    analysis: &SortAnalysis,
    outcome: &SolveOutcome,
) -> Result<Option<BTreeMap<String, String>>, String> {
    let sig = &problem.sig;
    let defaults = default_trees(sig, analysis);
    let show = |get: &dyn Fn(&Var) -> Option<String>| -> BTreeMap<String, String> {
        problem
            .consts
            .iter()
            .map(|c| {
                (
                    c.name().to_string(),
                    get(c).unwrap_or_else(|| defaults[&c.sort()].render(sig)),
                )
            })
            .collect()
    };
    match outcome {
        SolveOutcome::False => Ok(None),
        SolveOutcome::True => Ok(Some(show(&|_| None))),
        SolveOutcome::Disjunction(ds) => {
            let mut last = String::new();
            for d in ds {
                match extract_model(d, sig, analysis) {
                    Ok(val) => return Ok(Some(show(&|c| val.get(c).map(|t| t.render(sig))))),
                    Err(e) => last = e.to_string(),
                }
            }
            Err(last)
        }
    }
}

pub fn render(report: &Report, format: OutputFormat, show_stats: bool) -> String {
    match format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes") + "\n"
        }
        OutputFormat::Sexpr => render_sexpr(report),
        OutputFormat::Pretty => render_pretty(report, show_stats),
    }
}

fn render_sexpr(report: &Report) -> String {
    let mut out = String::new();
    match report.disjuncts.len() {
        0 => out.push_str(report.status.as_str()),
        1 => out.push_str(&report.disjuncts[0]),
        _ => {
            out.push_str("(or");
            for d in &report.disjuncts {
                out.push(' ');
                out.push_str(d);
            }
            out.push(')');
        }
    }
    out.push('\n');
    if let Some(m) = &report.model {
        out.push_str("(model");
        for (k, v) in m {
            let _ = write!(out, " ({k} {v})");
        }
        out.push_str(")\n");
    }
    if let Some(a) = &report.analysis {
        let _ = writeln!(
            out,
            "(analysis {})",
            serde_json::to_string(a).expect("report serializes")
        );
    }
    out
}

fn render_pretty(report: &Report, show_stats: bool) -> String {
    let mut out = String::new();
    if report.pretty_disjuncts.is_empty() {
        let _ = writeln!(out, "{}", report.status.as_str());
    }
    for (i, d) in report.pretty_disjuncts.iter().enumerate() {
        let _ = writeln!(out, "{}{d}", if i == 0 { "  " } else { "∨ " });
    }
    if let Some(m) = &report.model {
        out.push_str("model:\n");
        for (k, v) in m {
            let _ = writeln!(out, "  {k} = {v}");
        }
    }
    if let Some(e) = &report.model_error {
        let _ = writeln!(out, "model: not found ({e})");
    }
    if let Some(a) = &report.analysis {
        out.push_str(&render_analysis(a));
    }
    if show_stats {
        let s = &report.stats;
        let _ = writeln!(
            out,
            "steps: {}  rules: {}  instantiations: {:?}  depth reductions: {}  time: {:.3} ms",
            s.steps,
            s.rules.total(),
            s.instantiations,
            s.depth_reductions,
            s.wall_time_ms
        );
    }
    out
}

fn render_analysis(a: &AnalysisReport) -> String {
    let mut out = String::from("analysis:\n");
    let sets = [
        ("no finite trees", &a.no_finite),
        ("no infinite trees", &a.no_infinite),
        ("finitely many finite trees", &a.finitely_many_finite),
        ("one infinite tree", &a.unique_infinite),
        ("finitely many infinite trees", &a.finitely_many_infinite),
    ];
    for (label, set) in sets {
        let _ = writeln!(out, "  {label}: {{{}}}", set.join(", "));
    }
    for (label, map) in [
        ("finite inhabitants", &a.fin_inhabitants),
        ("infinite inhabitants", &a.infin_inhabitants),
    ] {
        for (sort, terms) in map {
            let _ = writeln!(out, "  {label} of {sort}: {{{}}}", terms.join(", "));
        }
    }
    for (sort, eqs) in &a.unique_infinite_eqs {
        let _ = writeln!(
            out,
            "  equations of the infinite {sort} tree: {}",
            eqs.join(" ")
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_problem;
    use crate::problem::tests::EXAMPLE;

    fn run_text(text: &str, opts: &RunOptions) -> Report {
        run(&parse_problem(text).unwrap(), opts).unwrap()
    }

    #[test]
    fn empty_assertions_are_true() {
        let r = run_text(&format!("{EXAMPLE} (simplify)"), &RunOptions::default());
        assert_eq!(r.status, Status::True);
    }

    #[test]
    fn list_cases_are_exhaustive() {
        let text = format!(
            "{EXAMPLE} (assert (not (exists ((x list)) (and (not (= x nil)) (not (exists ((y nat) (z list)) (= x (cons y z)))))))) (simplify)"
        );
        assert_eq!(run_text(&text, &RunOptions::default()).status, Status::True);
    }

    #[test]
    fn two_infinite_g2_trees() {
        let text = format!(
            "{EXAMPLE} (declare-const y t) (declare-const z t)
             (assert (not (exists ((x t)) (and (not (fin x)) (not (= x y)) (not (= x z))))))
             (simplify)"
        );
        let r = run_text(
            &text,
            &RunOptions {
                model: true,
                ..Default::default()
            },
        );
        assert_eq!(r.status, Status::Simplified);
        let m = r.model.expect("a model");
        let mut vals: Vec<&String> = m.values().collect();
        vals.sort();
        assert_eq!(
            vals,
            ["(g2 false #0=(succ #0#))", "(g2 true #0=(succ #0#))"]
        );
    }

    #[test]
    fn tiny_budget_times_out() {
        let text = format!(
            "{EXAMPLE} (declare-const y t) (declare-const z t)
             (assert (not (exists ((x t)) (and (not (fin x)) (not (= x y)) (not (= x z))))))
             (simplify)"
        );
        let r = run_text(
            &text,
            &RunOptions {
                budget: 10,
                ..Default::default()
            },
        );
        assert_eq!(r.status, Status::Timeout);
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn json_has_status_and_stats() {
        let r = run_text(
            &format!("{EXAMPLE} (declare-const x nat) (assert (= x (succ x))) (simplify)"),
            &RunOptions::default(),
        );
        let v: serde_json::Value =
            serde_json::from_str(&render(&r, OutputFormat::Json, false)).unwrap();
        assert_eq!(v["status"], "simplified");
        assert!(v["stats"]["wall_time_ms"].is_number());
        assert_eq!(v["disjuncts"].as_array().unwrap().len(), 1);
    }
}
