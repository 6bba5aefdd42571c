use serde::Serialize;

use super::{TrialRow, TrialTable};
use crate::bounds::runtime_bound;
use crate::error::{Error, Result};

/// Linear-interpolated quantile of sorted data, q in [0, 1].
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

/// Per-cell summary. Evaluation statistics cover successful trials only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellStats {
    pub cell_index: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub median_evaluations: Option<f64>,
    pub mean_evaluations: Option<f64>,
    pub iqr_evaluations: Option<f64>,
}

impl CellStats {
    pub fn from_rows(cell_index: usize, rows: &[&TrialRow]) -> Self {
        let mut evals: Vec<f64> = rows
            .iter()
            .filter(|r| r.result.success)
            .map(|r| r.result.evaluations as f64)
            .collect();
        evals.sort_by(f64::total_cmp);
        let (median, mean, iqr) = if evals.is_empty() {
            (None, None, None)
        } else {
            (
                Some(quantile(&evals, 0.5)),
                Some(evals.iter().sum::<f64>() / evals.len() as f64),
                Some(quantile(&evals, 0.75) - quantile(&evals, 0.25)),
            )
        };
        CellStats {
            cell_index,
            trials: rows.len(),
            successes: evals.len(),
            success_rate: if rows.is_empty() {
                0.0
            } else {
                evals.len() as f64 / rows.len() as f64
            },
            median_evaluations: median,
            mean_evaluations: mean,
            iqr_evaluations: iqr,
        }
    }
}

impl TrialTable {
    /// Statistics per cell, recomputed from the raw rows.
    pub fn aggregates(&self) -> Vec<CellStats> {
        (0..self.cells.len())
            .map(|c| {
                let rows: Vec<&TrialRow> = self.rows.iter().filter(|r| r.cell_index == c).collect();
                CellStats::from_rows(c, &rows)
            })
            .collect()
    }
}

/// Evaluations divided by the runtime bound at the row's (μ, n, m, k).
pub fn normalized_cost(row: &TrialRow) -> Result<f64> {
    if !row.result.success {
        return Err(Error::invalid(format!(
            "normalized cost of a failed trial (cell {}, trial {})",
            row.cell_index, row.trial
        )));
    }
    Ok(row.result.evaluations as f64 / runtime_bound(&row.cell.spec, row.cell.mu as f64))
}

/// Least-squares fit of log(evaluations) against log(n); returns (slope, r²).
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(n, e)| !(n > 0.0 && e > 0.0)) {
        return Err(Error::invalid("slope fit needs positive n and evaluations"));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("slope fit needs at least two distinct n"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok((slope, r2))
}

/// (n, median evaluations) for the given cells of an n-sweep, requiring at
/// least half of each cell's trials to succeed.
pub fn sweep_points(table: &TrialTable, cells: &[usize]) -> Result<Vec<(f64, f64)>> {
    let stats = table.aggregates();
    cells
        .iter()
        .map(|&c| {
            let s = stats
                .get(c)
                .ok_or_else(|| Error::invalid(format!("no cell {c} in table")))?;
            if s.success_rate < 0.5 {
                return Err(Error::invalid(format!(
                    "cell {c} succeeded in only {:.0}% of trials",
                    100.0 * s.success_rate
                )));
            }
            let median = s.median_evaluations.expect("successes exist");
            Ok((table.cells[c].spec.n() as f64, median))
        })
        .collect()
}
