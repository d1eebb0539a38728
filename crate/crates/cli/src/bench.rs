//! Benchmark harness: runs every problem file of a directory and buckets the
//! solving times.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::problem::parse_problem;
use crate::run::{run, RunOptions, Status};

/// File extension of problem files.
pub const PROBLEM_EXTENSION: &str = "tree";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Bucket {
    #[serde(rename = "< 1 ms")]
    Under1Ms,
    #[serde(rename = "< 10 ms")]
    Under10Ms,
    #[serde(rename = "< 100 ms")]
    Under100Ms,
    #[serde(rename = "< 1 s")]
    Under1S,
    #[serde(rename = "< 10 s")]
    Under10S,
    #[serde(rename = "timed out (> 10 s)")]
    TimedOut,
}

impl Bucket {
    pub const ALL: [Bucket; 6] = [
        Bucket::Under1Ms,
        Bucket::Under10Ms,
        Bucket::Under100Ms,
        Bucket::Under1S,
        Bucket::Under10S,
        Bucket::TimedOut,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Bucket::Under1Ms => "< 1 ms",
            Bucket::Under10Ms => "< 10 ms",
            Bucket::Under100Ms => "< 100 ms",
            Bucket::Under1S => "< 1 s",
            Bucket::Under10S => "< 10 s",
            Bucket::TimedOut => "timed out (> 10 s)",
        }
    }

    /// Each bucket excludes its upper edge; a run that did not finish is
    /// always `TimedOut`.
    pub fn of(elapsed: Duration, finished: bool) -> Bucket {
        if !finished {
            return Bucket::TimedOut;
        }
        match elapsed.as_secs_f64() * 1000.0 {
            ms if ms < 1.0 => Bucket::Under1Ms,
            ms if ms < 10.0 => Bucket::Under10Ms,
            ms if ms < 100.0 => Bucket::Under100Ms,
            ms if ms < 1000.0 => Bucket::Under1S,
            ms if ms < 10_000.0 => Bucket::Under10S,
            _ => Bucket::TimedOut,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub file: String,
    /// A report status, or `error` when the file could not be run.
    pub status: String,
    pub time_ms: f64,
    pub bucket: Bucket,
    pub instantiations: [u64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchSummary {
    pub rows: Vec<BenchRow>,
    pub histogram: Vec<(Bucket, usize)>,
    pub total: usize,
    /// Files that finished (any status other than `timeout` or `error`)
    /// within 10 s.
    pub completed: usize,
}

impl BenchSummary {
    pub fn completed_fraction(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.completed as f64 / self.total as f64
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("file,status,time_ms,bucket,cond1,cond2,cond3,cond4\n");
        for r in &self.rows {
            let [a, b, c, d] = r.instantiations;
            let _ = writeln!(
                out,
                "{},{},{:.3},{},{a},{b},{c},{d}",
                r.file,
                r.status,
                r.time_ms,
                r.bucket.label()
            );
        }
        out
    }

    pub fn histogram_table(&self) -> String {
        let mut out = String::new();
        for (b, n) in &self.histogram {
            let pct = if self.total == 0 {
                0.0
            } else {
                100.0 * *n as f64 / self.total as f64
            };
            let _ = writeln!(out, "{:<20} {:>5}  {:>6.2}%", b.label(), n, pct);
        }
        let _ = writeln!(out, "{:<20} {:>5}", "total", self.total);
        out
    }
}

pub fn problem_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == PROBLEM_EXTENSION))
        .collect();
    files.sort();
    Ok(files)
}

fn bench_file(path: &Path, opts: &RunOptions) -> BenchRow {
    let file = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let start = Instant::now();
    let result = std::fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|text| parse_problem(&text).map_err(|e| e.to_string()))
        .and_then(|p| run(&p, opts).map_err(|e| e.to_string()));
    let elapsed = start.elapsed();
    let time_ms = elapsed.as_secs_f64() * 1000.0;
    match result {
        Ok(report) => {
            let finished = report.status != Status::Timeout;
            BenchRow {
                file,
                status: report.status.as_str().to_string(),
                time_ms,
                bucket: Bucket::of(elapsed, finished),
                instantiations: report.stats.instantiations,
                error: None,
            }
        }
        Err(e) => BenchRow {
            file,
            status: "error".into(),
            time_ms,
            bucket: Bucket::of(elapsed, true),
            instantiations: [0; 4],
            error: Some(e),
        },
    }
}

/// Runs every problem file in `dir`, one solve per worker. A missing
/// timeout in `opts` defaults to 10 s, the upper edge of the last bucket.
pub fn bench(dir: &Path, opts: &RunOptions) -> std::io::Result<BenchSummary> {
    let files = problem_files(dir)?;
    let mut opts = opts.clone();
    opts.timeout.get_or_insert(Duration::from_secs(10));
    opts.model = false;
    let rows: Vec<BenchRow> = files.par_iter().map(|p| bench_file(p, &opts)).collect();
    let histogram = Bucket::ALL
        .iter()
        .map(|b| (*b, rows.iter().filter(|r| r.bucket == *b).count()))
        .collect();
    let completed = rows
        .iter()
        .filter(|r| r.status != "timeout" && r.status != "error" && r.bucket != Bucket::TimedOut)
        .count();
    Ok(BenchSummary {
        total: rows.len(),
        rows,
        histogram,
        completed,
    })
}
