//! Campaign reports.
//!
//! * `summary.csv`: algorithm, runs, mean, std, best, median, worst,
//!   friedman_rank, kw_p (that algorithm against all others pooled)
//! * `timing.csv`: algorithm, runs, mean_time_to_best, mean_total_time,
//!   mean_evaluations_to_best
//! * `trajectories.csv`: algorithm, seed, index, cost, best_so_far; one row
//!   per evaluation of every run
//! * `summary.json`: all of the above plus both test statistics
//!
//! Empty rank or p-value cells mean the test was not applicable, e.g. a
//! single algorithm or unequal run counts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use olsr_tune::olsr::OlsrConfig;
use olsr_tune::optimizers::{Algorithm, RunRecord};
use olsr_tune::stats::{
    format_summary, friedman_mean_ranks, kruskal_wallis, kruskal_wallis_vs_rest, summary_table, ResultMatrix, SummaryRow,
};
use serde::Serialize;

use crate::write_atomic;

pub const SUMMARY_FORMAT_TAG: &str = "olsr-tune-summary/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    All,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "all" => Ok(ReportFormat::All),
            _ => Err(format!("unknown format {s:?} (expected csv, json or all)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
    pub best: f64,
    pub median: f64,
    pub worst: f64,
    pub friedman_rank: Option<f64>,
    pub kw_p: Option<f64>,
    pub mean_time_to_best: f64,
    pub mean_total_time: f64,
    pub mean_evaluations_to_best: f64,
    pub best_config: OlsrConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub best_so_far: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub format: String,
    pub objective: String,
    pub algorithms: Vec<AlgorithmSummary>,
    pub friedman: Option<TestResult>,
    pub kruskal_wallis: Option<TestResult>,
    pub trajectories: Vec<Trajectory>,
}

/// Every `.run` file in `dir/runs`, or in `dir` itself when there is no
/// `runs` subdirectory, ordered by algorithm then seed.
pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let runs = dir.join("runs");
    let source = if runs.is_dir() { runs } else { dir.to_path_buf() };
    let mut records = Vec::new();
    for entry in fs::read_dir(&source).with_context(|| format!("reading {}", source.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "run") {
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            records.push(RunRecord::parse(&text).with_context(|| format!("parsing {}", path.display()))?);
        }
    }
    if records.is_empty() {
        bail!("no .run records in {}", source.display());
    }
    records.sort_by_key(|r| (r.algorithm, r.seed));
    Ok(records)
}

pub fn summarize(records: &[RunRecord]) -> Summary {
    let rows = summary_table(records);
    let groups: Vec<Vec<f64>> = rows
        .iter()
        .map(|row| {
            let mut mine: Vec<&RunRecord> = records.iter().filter(|r| r.algorithm == row.algorithm).collect();
            mine.sort_by_key(|r| r.seed);
            mine.iter().map(|r| r.best.cost).collect()
        })
        .collect();

    let friedman = ResultMatrix::from_columns(&groups).ok().map(|m| friedman_mean_ranks(&m));
    let kw = kruskal_wallis(&groups).ok();
    let kw_p = kruskal_wallis_vs_rest(&groups).ok();

    let algorithms = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mine: Vec<&RunRecord> = records.iter().filter(|r| r.algorithm == row.algorithm).collect();
            let best = mine.iter().min_by(|a, b| a.best.cost.total_cmp(&b.best.cost)).expect("row has records");
            let evals = mine.iter().map(|r| r.evaluations_to_best() as f64).sum::<f64>() / mine.len() as f64;
            AlgorithmSummary {
                algorithm: row.algorithm,
                runs: row.runs,
                mean: row.mean,
                std: row.std,
                best: row.best,
                median: row.median,
                worst: row.worst,
                friedman_rank: friedman.as_ref().map(|f| f.mean_ranks[i]),
                kw_p: kw_p.as_ref().map(|p| p[i]),
                mean_time_to_best: row.time_to_best,
                mean_total_time: row.total_time,
                mean_evaluations_to_best: evals,
                best_config: best.best.config,
            }
        })
        .collect();

    let mut objectives: Vec<&str> = records.iter().map(|r| r.objective.as_str()).collect();
    objectives.dedup();
    Summary {
        format: SUMMARY_FORMAT_TAG.into(),
        objective: objectives.join("+"),
        algorithms,
        friedman: friedman.map(|f| TestResult { statistic: f.statistic, p_value: f.p_value }),
        kruskal_wallis: kw.map(|k| TestResult { statistic: k.statistic, p_value: k.p_value }),
        trajectories: records.iter().map(|r| Trajectory { algorithm: r.algorithm, seed: r.seed, best_so_far: r.best_so_far() }).collect(),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

pub fn summary_csv(summary: &Summary) -> String {
    let mut out = String::from("algorithm,runs,mean,std,best,median,worst,friedman_rank,kw_p\n");
    for a in &summary.algorithms {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            a.algorithm,
            a.runs,
            a.mean,
            a.std,
            a.best,
            a.median,
            a.worst,
            opt(a.friedman_rank),
            opt(a.kw_p)
        )
        .unwrap();
    }
    out
}

pub fn timing_csv(summary: &Summary) -> String {
    let mut out = String::from("algorithm,runs,mean_time_to_best,mean_total_time,mean_evaluations_to_best\n");
    for a in &summary.algorithms {
        writeln!(out, "{},{},{},{},{}", a.algorithm, a.runs, a.mean_time_to_best, a.mean_total_time, a.mean_evaluations_to_best)
            .unwrap();
    }
    out
}

pub fn trajectories_csv(records: &[RunRecord]) -> String {
    let mut out = String::from("algorithm,seed,index,cost,best_so_far\n");
    for r in records {
        for (p, best) in r.trajectory.iter().zip(r.best_so_far()) {
            writeln!(out, "{},{},{},{},{}", r.algorithm, r.seed, p.index, p.cost, best).unwrap();
        }
    }
    out
}

/// Human-readable table for the terminal.
pub fn summary_text(summary: &Summary) -> String {
    let rows: Vec<SummaryRow> = summary
        .algorithms
        .iter()
        .map(|a| SummaryRow {
            algorithm: a.algorithm,
            runs: a.runs,
            mean: a.mean,
            std: a.std,
            best: a.best,
            median: a.median,
            worst: a.worst,
            time_to_best: a.mean_time_to_best,
            total_time: a.mean_total_time,
        })
        .collect();
    let ranks: Option<Vec<f64>> = summary.algorithms.iter().map(|a| a.friedman_rank).collect();
    let ps: Option<Vec<f64>> = summary.algorithms.iter().map(|a| a.kw_p).collect();
    let mut out = format!("objective: {}\n", summary.objective);
    out += &format_summary(&rows, ranks.as_deref(), ps.as_deref());
    if let Some(f) = &summary.friedman {
        writeln!(out, "friedman: statistic {:.4}, p {:.3e}", f.statistic, f.p_value).unwrap();
    }
    if let Some(k) = &summary.kruskal_wallis {
        writeln!(out, "kruskal-wallis: H {:.4}, p {:.3e}", k.statistic, k.p_value).unwrap();
    }
    out
}

/// Writes the report files for `records` into `out` and returns the summary.
pub fn write_reports(records: &[RunRecord], out: &Path, format: ReportFormat) -> Result<Summary> {
    let summary = summarize(records);
    if matches!(format, ReportFormat::Csv | ReportFormat::All) {
        write_atomic(&out.join("summary.csv"), &summary_csv(&summary))?;
        write_atomic(&out.join("timing.csv"), &timing_csv(&summary))?;
        write_atomic(&out.join("trajectories.csv"), &trajectories_csv(records))?;
    }
    if matches!(format, ReportFormat::Json | ReportFormat::All) {
        write_atomic(&out.join("summary.json"), &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    }
    Ok(summary)
}
