//! Rank-based comparison of optimizer results and per-algorithm summaries.
//!
//! Both tests use the chi-square approximation with tie correction.

use std::fmt::Write as _;

use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::optimizers::{Algorithm, RunRecord};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least 2 {what}, got {got}")]
    TooFew { what: &'static str, got: usize },
    #[error("row {row} has {got} cells, expected {expected}")]
    Ragged { row: usize, expected: usize, got: usize },
    #[error("group {0} is empty")]
    EmptyGroup(usize),
    #[error("non-finite value {0}")]
    NonFinite(f64),
}

/// Final costs: one row per independent run, one column per algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultMatrix {
    rows: Vec<Vec<f64>>,
}

impl ResultMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, StatsError> {
        if rows.len() < 2 {
            return Err(StatsError::TooFew { what: "rows", got: rows.len() });
        }
        let k = rows[0].len();
        if k < 2 {
            return Err(StatsError::TooFew { what: "columns", got: k });
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != k {
                return Err(StatsError::Ragged { row, expected: k, got: r.len() });
            }
            if let Some(&v) = r.iter().find(|v| !v.is_finite()) {
                return Err(StatsError::NonFinite(v));
            }
        }
        Ok(ResultMatrix { rows })
    }

    /// Builds the matrix from per-algorithm cost lists of equal length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self, StatsError> {
        let n = columns.first().map_or(0, Vec::len);
        if let Some((c, col)) = columns.iter().enumerate().find(|(_, c)| c.len() != n) {
            return Err(StatsError::Ragged { row: c, expected: n, got: col.len() });
        }
        Self::from_rows((0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect())
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn columns(&self) -> usize {
        self.rows[0].len()
    }
}

/// Ascending ranks starting at 1; tied values share the mean of their ranks.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let mid = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = mid;
        }
        i = j;
    }
    ranks
}

/// Sum of `t^3 - t` over groups of tied values.
fn tie_term(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .chunk_by(|a, b| a == b)
        .map(|g| {
            let t = g.len() as f64;
            t * t * t - t
        })
        .sum()
}

fn chi_square_sf(stat: f64, df: usize) -> f64 {
    if stat <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("df >= 1");
    dist.sf(stat).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Friedman {
    /// Mean rank per column; 1 is best.
    pub mean_ranks: Vec<f64>,
    pub statistic: f64,
    pub p_value: f64,
}

pub fn friedman_mean_ranks(matrix: &ResultMatrix) -> Friedman {
    let n = matrix.rows.len() as f64;
    let k = matrix.columns();
    let kf = k as f64;
    let mut sums = vec![0.0; k];
    let mut ties = 0.0;
    for row in &matrix.rows {
        for (s, r) in sums.iter_mut().zip(mid_ranks(row)) {
            *s += r;
        }
        ties += tie_term(row);
    }
    let raw = 12.0 / (n * kf * (kf + 1.0)) * sums.iter().map(|r| r * r).sum::<f64>() - 3.0 * n * (kf + 1.0);
    let correction = 1.0 - ties / (n * kf * (kf * kf - 1.0));
    let statistic = if correction <= 0.0 { 0.0 } else { (raw / correction).max(0.0) };
    Friedman {
        mean_ranks: sums.iter().map(|s| s / n).collect(),
        statistic,
        p_value: chi_square_sf(statistic, k - 1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KruskalWallis {
    pub statistic: f64,
    pub p_value: f64,
}

pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<KruskalWallis, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFew { what: "groups", got: groups.len() });
    }
    if let Some(g) = groups.iter().position(Vec::is_empty) {
        return Err(StatsError::EmptyGroup(g));
    }
    let pooled: Vec<f64> = groups.concat();
    if let Some(&v) = pooled.iter().find(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite(v));
    }
    let ranks = mid_ranks(&pooled);
    let total = pooled.len() as f64;
    let mut offset = 0;
    let mut weighted = 0.0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        weighted += r * r / g.len() as f64;
        offset += g.len();
    }
    let raw = 12.0 / (total * (total + 1.0)) * weighted - 3.0 * (total + 1.0);
    let correction = 1.0 - tie_term(&pooled) / (total * total * total - total);
    let statistic = if correction <= 0.0 { 0.0 } else { (raw / correction).max(0.0) };
    Ok(KruskalWallis { statistic, p_value: chi_square_sf(statistic, groups.len() - 1) })
}

/// For each group, the Kruskal–Wallis p-value of that group against all
/// other groups pooled together.
pub fn kruskal_wallis_vs_rest(groups: &[Vec<f64>]) -> Result<Vec<f64>, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFew { what: "groups", got: groups.len() });
    }
    (0..groups.len())
        .map(|i| {
            let rest: Vec<f64> = groups.iter().enumerate().filter(|(j, _)| *j != i).flat_map(|(_, g)| g.clone()).collect();
            kruskal_wallis(&[groups[i].clone(), rest]).map(|kw| kw.p_value)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
    pub best: f64,
    pub median: f64,
    pub worst: f64,
    /// Mean seconds until the best candidate was found.
    pub time_to_best: f64,
    /// Mean seconds per run.
    pub total_time: f64,
}

impl SummaryRow {
    pub fn from_costs(algorithm: Algorithm, costs: &[f64], times_to_best: &[f64], total_times: &[f64]) -> Option<Self> {
        if costs.is_empty() {
            return None;
        }
        let n = costs.len() as f64;
        let mean = costs.iter().sum::<f64>() / n;
        let std = if costs.len() > 1 {
            (costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut sorted = costs.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 { sorted[mid] } else { (sorted[mid - 1] + sorted[mid]) / 2.0 };
        let avg = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
        Some(SummaryRow {
            algorithm,
            runs: costs.len(),
            mean,
            std,
            best: sorted[0],
            median,
            worst: sorted[sorted.len() - 1],
            time_to_best: avg(times_to_best),
            total_time: avg(total_times),
        })
    }
}

/// One row per algorithm present in `records`, in canonical algorithm order.
pub fn summary_table(records: &[RunRecord]) -> Vec<SummaryRow> {
    Algorithm::ALL
        .into_iter()
        .filter_map(|alg| {
            let mine: Vec<&RunRecord> = records.iter().filter(|r| r.algorithm == alg).collect();
            let costs: Vec<f64> = mine.iter().map(|r| r.best.cost).collect();
            let tb: Vec<f64> = mine.iter().map(|r| r.time_to_best).collect();
            let tr: Vec<f64> = mine.iter().map(|r| r.total_time).collect();
            SummaryRow::from_costs(alg, &costs, &tb, &tr)
        })
        .collect()
}

/// Fixed-width text table of summary rows, optionally with Friedman mean
/// ranks and Kruskal–Wallis p-values aligned to the rows.
pub fn format_summary(rows: &[SummaryRow], mean_ranks: Option<&[f64]>, kw_p: Option<&[f64]>) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<5} {:>4} {:>22} {:>11} {:>11} {:>11} {:>6} {:>9} {:>9} {:>9}",
        "alg", "runs", "mean±std", "best", "median", "worst", "fried", "kw_p", "t_best", "t_run"
    )
    .unwrap();
    for (i, r) in rows.iter().enumerate() {
        let rank = mean_ranks.and_then(|m| m.get(i)).map_or("-".into(), |v| format!("{v:.2}"));
        let p = kw_p.and_then(|m| m.get(i)).map_or("-".into(), |v| format!("{v:.2e}"));
        writeln!(
            out,
            "{:<5} {:>4} {:>22} {:>11.5} {:>11.5} {:>11.5} {:>6} {:>9} {:>9.3} {:>9.3}",
            r.algorithm.label(),
            r.runs,
            format!("{:.5}±{:.5}", r.mean, r.std),
            r.best,
            r.median,
            r.worst,
            rank,
            p,
            r.time_to_best,
            r.total_time
        )
        .unwrap();
    }
    out
}
