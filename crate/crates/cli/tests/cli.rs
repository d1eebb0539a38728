//! The `treesolve` binary and the problem syntax, end to end.

use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use rand::Rng;
use treesolve::{parse_formula, Context};
use treetheory::formula::to_sexpr;
use treetheory::oracle::random::{random_formula_with, rng_from_seed};
use treetheory::oracle::FormulaProfile;
use treetheory::{canonicalize, example_signature, solve, SortAnalysis, SortId, Var};

const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus");

fn treesolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treesolve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_cases_print_true() {
    let o = treesolve(&[&format!("{CORPUS}/list_cases_1.tree")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "true");
}

#[test]
fn model_for_two_infinite_trees() {
    let o = treesolve(&[
        &format!("{CORPUS}/infinite_t_2.tree"),
        "--model",
        "--output",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "simplified");
    let mut values = vec![
        v["model"]["y0"].as_str().unwrap(),
        v["model"]["y1"].as_str().unwrap(),
    ];
    values.sort();
    assert_eq!(
        values,
        ["(g2 false #0=(succ #0#))", "(g2 true #0=(succ #0#))"]
    );
    assert!(v["stats"]["instantiations"].as_array().unwrap().len() == 4);
}

#[test]
fn errors_report_position_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.tree", "(declare-sort a)\n(declare-gen k () a)\n(declare-gen j () a)\n(assert (= k))\n(simplify)\n");
    let o = treesolve(&[&p]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with(&format!("{p}:4:")), "{err}");
}

#[test]
fn exhausted_budget_exits_two() {
    let o = treesolve(&[&format!("{CORPUS}/nat_cases_4.tree"), "--budget", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).trim(), "timeout");
}

#[test]
fn check_sat_answers_sat_or_unsat() {
    let o = treesolve(&[&format!("{CORPUS}/finite_d_2.tree")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "unsat");
}

#[test]
fn datatype_problems_run_through_the_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let text = "\
(declare-datatype nat ((zero) (succ (pred nat))))
(declare-const x nat)
(assert (and (= x zero) (= (pred x) (succ zero))))
(check-sat)
";
    let p = write(dir.path(), "loop.tree", text);
    let o = treesolve(&[&p]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim(),
        "sat",
        "pred of a non-succ value is unconstrained"
    );
    let o = treesolve(&[&p, "--semantics", "defaults"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "unsat", "the default of pred is zero");
}

#[test]
fn bench_writes_csv_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let o = treesolve(&[
        "--generate",
        dir.path().to_str().unwrap(),
        "--count",
        "25",
        "--seed",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = treesolve(&["--bench", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert_eq!(
        csv.lines().next().unwrap(),
        "file,status,time_ms,bucket,cond1,cond2,cond3,cond4"
    );
    assert_eq!(csv.lines().count(), 26);
    let hist = String::from_utf8_lossy(&o.stderr);
    for label in [
        "< 1 ms",
        "< 10 ms",
        "< 100 ms",
        "< 1 s",
        "< 10 s",
        "timed out (> 10 s)",
    ] {
        assert!(hist.contains(label), "{hist}");
    }
}

#[test]
fn bench_reports_budget_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(
        format!("{CORPUS}/nat_cases_4.tree"),
        dir.path().join("n.tree"),
    )
    .unwrap();
    let o = treesolve(&["--bench", dir.path().to_str().unwrap(), "--budget", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("n.tree,timeout,"), "{row}");
    assert!(row.contains("timed out (> 10 s)"), "{row}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Rendering a formula or a solver output and parsing it back yields the
    /// same formula up to canonical naming and ordering.
    #[test]
    fn render_then_parse_round_trips(seed in any::<u64>()) {
        let sig = example_signature();
        let an = SortAnalysis::compute(&sig).unwrap();
        let mut rng = rng_from_seed(seed);
        let sorts: Vec<SortId> = sig.sorts().collect();
        let consts: Vec<Var> =
            (0..rng.gen_range(0..=2)).map(|i| Var::new(format!("k{i}"), sorts[rng.gen_range(0..sorts.len())])).collect();
        let p = FormulaProfile { quantifier_depth: 2, max_atoms: 5, term_depth: 2, free: consts.clone(), ..Default::default() };
        let f = random_formula_with(&mut rng, &sig, &p);
        let ctx = Context::new(&sig, None, consts);
        let back = parse_formula(&to_sexpr(&f, &sig), &ctx).unwrap();
        prop_assert_eq!(canonicalize(&back, &sig), canonicalize(&f, &sig));
        let out = solve(&f, &sig, &an).unwrap().to_formula();
        let back = parse_formula(&to_sexpr(&out, &sig), &ctx).unwrap();
        prop_assert_eq!(canonicalize(&back, &sig), canonicalize(&out, &sig));
    }
}
