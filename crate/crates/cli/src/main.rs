use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context as _, Result};
use clap::Parser;
use treesolve::bench::bench;
use treesolve::corpus::generate_corpus;
use treesolve::run::Mode;
use treesolve::{parse_problem, render, run, OutputFormat, RunOptions, Semantics, Status};
use treetheory::solver::DEFAULT_STEP_BUDGET;

/// Decides and simplifies formulae over finite and infinite trees.
///
/// Exit status: 0 when the run completed, 1 on parse, sort or declaration
/// errors, 2 when the budget or timeout was exhausted.
#[derive(Parser, Debug)]
#[command(name = "treesolve", version)]
struct Args {
    /// Problem file to run.
    file: Option<PathBuf>,

    /// How to read the declarations; inferred from them when omitted.
    #[arg(long, value_enum)]
    mode: Option<Mode>,

    /// Meaning of selectors applied to the wrong constructor.
    #[arg(long, value_enum, default_value = "standard")]
    semantics: Semantics,

    /// Maximal number of solver steps.
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    budget: u64,

    #[arg(long)]
    timeout_secs: Option<u64>,

    /// Print the sort analysis of the signature.
    #[arg(long)]
    print_analysis: bool,

    /// Print values for the declared constants satisfying the result.
    #[arg(long)]
    model: bool,

    #[arg(long, value_enum, default_value = "pretty")]
    output: OutputFormat,

    /// Print solver counters and wall time.
    #[arg(long)]
    stats: bool,

    /// Run every `.tree` file in a directory and print a CSV summary.
    #[arg(long, value_name = "DIR", conflicts_with = "file")]
    bench: Option<PathBuf>,

    /// Write a generated benchmark corpus into a directory.
    #[arg(long, value_name = "DIR", conflicts_with_all = ["file", "bench"])]
    generate: Option<PathBuf>,

    /// Number of files for --generate.
    #[arg(long, default_value_t = 60)]
    count: usize,

    /// Seed for --generate.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn options(args: &Args) -> RunOptions {
    RunOptions {
        mode: args.mode,
        semantics: args.semantics,
        budget: args.budget,
        timeout: args.timeout_secs.map(Duration::from_secs),
        print_analysis: args.print_analysis,
        model: args.model,
    }
}

fn run_file(args: &Args, path: &PathBuf) -> Result<ExitCode> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let problem = match parse_problem(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}:{e}", path.display());
            return Ok(ExitCode::from(1));
        }
    };
    let report = match run(&problem, &options(args)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return Ok(ExitCode::from(1));
        }
    };
    print!("{}", render(&report, args.output, args.stats));
    Ok(if report.status == Status::Timeout {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_bench(args: &Args, dir: &Path) -> Result<ExitCode> {
    let summary =
        bench(dir, &options(args)).with_context(|| format!("reading {}", dir.display()))?;
    match args.output {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
        _ => {
            print!("{}", summary.to_csv());
            eprint!("{}", summary.histogram_table());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(args: &Args, dir: &PathBuf) -> Result<ExitCode> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, text) in generate_corpus(args.seed, args.count) {
        std::fs::write(dir.join(&name), text).with_context(|| format!("writing {name}"))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    let args = Args::parse();
    if let Some(dir) = &args.generate {
        return generate(&args, dir);
    }
    if let Some(dir) = &args.bench {
        return run_bench(&args, dir);
    }
    match &args.file {
        Some(path) => run_file(&args, path),
        None => bail!("no problem file given (see --help)"),
    }
}
