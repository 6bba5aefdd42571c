//! Experiment grids: plan parsing, parallel trial execution, aggregation and
//! CSV/JSON output.

mod emit;
mod plan;
mod stats;

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::baseline::{baseline_run, BaselineConfig};
use crate::bitstring::RandomSource;
use crate::error::{Error, Result};
use crate::problems::{pareto_front, ObjectiveVector};
use crate::run_result::RunResult;
use crate::spea2::{self, EngineConfig};

pub use emit::{format_sig6, write_csv, write_json, OutputFormat, CSV_HEADER};
pub use plan::{Algorithm, Cell, CellConfig, ExperimentPlan};
pub use stats::{fit_loglog_slope, median, normalized_cost, quantile, sweep_points, CellStats};

/// One trial of one cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub cell_index: usize,
    pub trial: usize,
    pub cell: Cell,
    pub result: RunResult,
}

/// All rows of an executed plan, in (cell, trial) order.
#[derive(Clone, Debug)]
pub struct TrialTable {
    pub plan: ExperimentPlan,
    pub cells: Vec<Cell>,
    pub rows: Vec<TrialRow>,
}

impl TrialTable {
    pub fn rows_for(&self, cell: usize) -> impl Iterator<Item = &TrialRow> {
        self.rows.iter().filter(move |r| r.cell_index == cell)
    }
}

/// Seed of trial `trial` in cell `cell`.
pub fn trial_seed(master: u64, cell: usize, trial: usize) -> u64 {
    RandomSource::derive_seed(master, &[cell as u64, trial as u64])
}

/// Runs a single trial of a validated cell.
pub fn run_cell(cell: &Cell, seed: u64, front: &HashSet<ObjectiveVector>) -> Result<RunResult> {
    match cell.algorithm.baseline() {
        None => {
            let config = EngineConfig::new(cell.spec, cell.mu, cell.archive)
                .with_mutation(cell.mutation)
                .with_density_k(cell.density_k)
                .with_budget(cell.budget)
                .with_seed(seed);
            spea2::run(&config, front)
        }
        Some(alg) => {
            let config = BaselineConfig::new(cell.spec, alg)
                .with_budget(cell.budget)
                .with_seed(seed);
            baseline_run(&config, front)
        }
    }
}

/// Validates every cell, then runs all trials on `workers` threads.
/// Results do not depend on the worker count.
pub fn run_plan(plan: &ExperimentPlan, workers: usize) -> Result<TrialTable> {
    let cells = plan.validate()?;
    let fronts = cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            pareto_front(&c.spec).map_err(|e| Error::InvalidCell {
                cell: i,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..plan.trials_per_cell).map(move |t| (c, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, t)| {
                let seed = trial_seed(plan.master_seed, c, t);
                run_cell(&cells[c], seed, &fronts[c]).map(|result| TrialRow {
                    cell_index: c,
                    trial: t,
                    cell: cells[c].clone(),
                    result,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(TrialTable {
        plan: plan.clone(),
        cells,
        rows,
    })
}
