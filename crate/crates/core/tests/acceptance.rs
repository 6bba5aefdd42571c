//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Worker threads come from MOEA_WORKERS, else all cores.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use moea_core::dominance::{assign_fitness, nondominated_indices, raw_fitness, strength};
use moea_core::harness::{
    fit_loglog_slope, normalized_cost, run_plan, Algorithm, CellConfig, ExperimentPlan, TrialTable,
};
use moea_core::oracle::{self, brute_nondominated};
use moea_core::{pareto_front, DensityK, ObjectiveVector, ProblemSpec, RandomSource, Semo};
use moea_core::{BaselineAlgorithm, BaselineConfig};

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            passed,
            detail: detail.into(),
        }
    }
}

fn workers() -> usize {
    std::env::var("MOEA_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w: &usize| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn fronts() -> Verdict {
    let o = oracle::check_fronts();
    Verdict::new(o.passed, o.detail)
}

fn preservation() -> Verdict {
    let omm = ProblemSpec::one_min_max(2, 16).unwrap();
    let lotz = ProblemSpec::lotz(2, 12).unwrap();
    let ojzj = ProblemSpec::ojzj(2, 12, 2).unwrap();
    let mut cases = Vec::new();
    for k in [DensityK::Fixed(1), DensityK::Auto] {
        cases.push((omm, 17, k));
        cases.push((lotz, 13, k));
        cases.push((ojzj, 11, k));
    }
    let seeds: Vec<u64> = (0..20).collect();
    let o = oracle::check_preservation_cases(&cases, &seeds, 200);
    Verdict::new(o.passed, format!("{} selections, {}", 6 * 20 * 200, o.detail))
}

fn truncation() -> Verdict {
    let o = oracle::check_truncation(3, 500);
    Verdict::new(o.passed, o.detail)
}

fn dominance() -> Verdict {
    let mut rng = RandomSource::new(4);
    let mut failures = Vec::new();
    for _ in 0..1000 {
        let m = 2 * rng.random_range(1..=3);
        let size = rng.random_range(1..=20);
        let pool: Vec<ObjectiveVector> = (0..size)
            .map(|_| ObjectiveVector::new((0..m).map(|_| rng.random_range(0..=4))))
            .collect();
        let fast = nondominated_indices(&pool).unwrap();
        let slow = brute_nondominated(&pool).unwrap();
        if fast != slow {
            failures.push(format!("{pool:?}: subset {fast:?} vs {slow:?}"));
        }
        let nd: HashSet<usize> = slow.into_iter().collect();
        // a lone member has no neighbour to measure density against
        let records = if pool.len() > 1 {
            assign_fitness(&pool, 1).unwrap()
        } else {
            Vec::new()
        };
        for i in 0..pool.len() {
            let raw = raw_fitness(&pool, i);
            if (raw == 0) != nd.contains(&i) || records.get(i).is_some_and(|rec| rec.raw != raw) {
                failures.push(format!("{pool:?}: raw fitness of {i} is {raw}"));
            }
        }
    }
    let hand: Vec<ObjectiveVector> = [[3, 0], [2, 1], [1, 1], [0, 0]]
        .into_iter()
        .map(ObjectiveVector::from)
        .collect();
    let s: Vec<u32> = (0..4).map(|i| strength(&hand, i)).collect();
    let r: Vec<u64> = (0..4).map(|i| raw_fitness(&hand, i)).collect();
    if s != [1, 2, 1, 0] || r != [0, 0, 2, 4] {
        failures.push(format!("hand pool: S={s:?} R={r:?}"));
    }
    let detail = match failures.first() {
        None => "1000 pools agree; hand pool S=(1,2,1,0) R=(0,0,2,4)".to_string(),
        Some(f) => format!("{} mismatches; first: {f}", failures.len()),
    };
    Verdict::new(failures.is_empty(), detail)
}

fn sweep_plan(seed: u64, trials: usize, cells: Vec<CellConfig>) -> ExperimentPlan {
    ExperimentPlan::new(seed, trials, cells)
}

fn spea2_cells(specs: &[ProblemSpec], size: impl Fn(usize) -> usize) -> Vec<CellConfig> {
    specs
        .iter()
        .map(|s| CellConfig::new(Algorithm::Spea2, s).with_sizes(size(s.n()), size(s.n())))
        .collect()
}

/// Median normalized cost per cell, over successful trials.
fn median_costs(table: &TrialTable) -> Vec<f64> {
    (0..table.cells.len())
        .map(|c| {
            let costs: Vec<f64> = table.rows_for(c).filter_map(|r| normalized_cost(r).ok()).collect();
            if costs.is_empty() {
                f64::NAN
            } else {
                moea_core::harness::median(&costs)
            }
        })
        .collect()
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(", ")
}

struct Scaling {
    table: TrialTable,
    successes: usize,
    trials: usize,
    costs: Vec<f64>,
}

fn scaling(plan: &ExperimentPlan) -> Scaling {
    let table = run_plan(plan, workers()).expect("valid plan");
    let successes = table.rows.iter().filter(|r| r.result.success).count();
    let trials = table.rows.len();
    let costs = median_costs(&table);
    Scaling {
        table,
        successes,
        trials,
        costs,
    }
}

fn omm_plan() -> ExperimentPlan {
    let specs: Vec<ProblemSpec> = [16, 32, 64, 128]
        .iter()
        .map(|&n| ProblemSpec::one_min_max(2, n).unwrap())
        .collect();
    sweep_plan(5, 30, spea2_cells(&specs, |n| n + 1))
}

fn lotz_plan() -> ExperimentPlan {
    let specs: Vec<ProblemSpec> = [8, 16, 32, 64]
        .iter()
        .map(|&n| ProblemSpec::lotz(2, n).unwrap())
        .collect();
    sweep_plan(6, 30, spea2_cells(&specs, |n| n + 1))
}

fn ojzj_plan() -> ExperimentPlan {
    let specs: Vec<ProblemSpec> = [8, 12, 16, 20]
        .iter()
        .map(|&n| ProblemSpec::ojzj(2, n, 2).unwrap())
        .collect();
    sweep_plan(7, 30, spea2_cells(&specs, |n| n - 2 * 2 + 3))
}

fn omm_scaling(plan: &ExperimentPlan) -> (Verdict, TrialTable) {
    let s = scaling(plan);
    let ratio = spread(&s.costs);
    let passed = s.successes == s.trials && ratio <= 4.0;
    let detail = format!(
        "success {}/{}; median cost [{}]; max/min {ratio:.2} (<= 4)",
        s.successes,
        s.trials,
        fmt_list(&s.costs)
    );
    (Verdict::new(passed, detail), s.table)
}

fn lotz_scaling(plan: &ExperimentPlan) -> (Verdict, TrialTable) {
    let s = scaling(plan);
    let ratio = spread(&s.costs);
    let points: Vec<(f64, f64)> = s
        .table
        .aggregates()
        .iter()
        .map(|a| {
            (
                s.table.cells[a.cell_index].spec.n() as f64,
                a.median_evaluations.unwrap_or(f64::NAN),
            )
        })
        .collect();
    let (slope, r2) = fit_loglog_slope(&points).unwrap_or((f64::NAN, f64::NAN));
    let passed = s.successes == s.trials && ratio <= 4.0 && (2.5..=3.5).contains(&slope);
    let detail = format!(
        "success {}/{}; median cost [{}]; max/min {ratio:.2} (<= 4); slope {slope:.3} in [2.5, 3.5], r2 {r2:.3}",
        s.successes,
        s.trials,
        fmt_list(&s.costs)
    );
    (Verdict::new(passed, detail), s.table)
}

fn ojzj_scaling(plan: &ExperimentPlan) -> (Verdict, TrialTable) {
    let s = scaling(plan);
    let ratio = spread(&s.costs);
    let rate = s.successes as f64 / s.trials as f64;
    let passed = rate >= 0.9 && ratio <= 6.0;
    let detail = format!(
        "success {}/{} (>= 90%); median cost [{}]; max/min {ratio:.2} (<= 6)",
        s.successes,
        s.trials,
        fmt_list(&s.costs)
    );
    (Verdict::new(passed, detail), s.table)
}

fn gsemo_plan() -> ExperimentPlan {
    let cells = [8, 16, 32]
        .iter()
        .map(|&n| CellConfig::new(Algorithm::Gsemo, &ProblemSpec::one_min_max(2, n).unwrap()))
        .collect();
    sweep_plan(8, 50, cells)
}

fn gsemo_consistency(plan: &ExperimentPlan) -> (Verdict, TrialTable) {
    // population bound, observed on every iteration of every trial
    let mut overflow = None;
    for (c, cell) in plan.validate().expect("valid plan").iter().enumerate() {
        let n = cell.spec.n();
        let front = pareto_front(&cell.spec).unwrap();
        for t in 0..plan.trials_per_cell {
            let seed = moea_core::harness::trial_seed(plan.master_seed, c, t);
            let cfg = BaselineConfig::new(cell.spec, BaselineAlgorithm::Gsemo)
                .with_budget(cell.budget)
                .with_seed(seed);
            let mut peak = 0;
            Semo::new(cfg, &front)
                .unwrap()
                .run_observed(|pop| peak = peak.max(pop.len()))
                .unwrap();
            if peak > n + 1 && overflow.is_none() {
                overflow = Some(format!("n={n} seed {seed}: population {peak}"));
            }
        }
    }
    let table = run_plan(plan, workers()).expect("valid plan");
    let successes = table.rows.iter().filter(|r| r.result.success).count();
    let normalized: Vec<f64> = table
        .aggregates()
        .iter()
        .map(|a| {
            let n = table.cells[a.cell_index].spec.n() as f64;
            a.median_evaluations.unwrap_or(f64::NAN) / ((n + 1.0) * n * n.ln())
        })
        .collect();
    let ratio = spread(&normalized);
    let passed = overflow.is_none() && successes == table.rows.len() && ratio <= 4.0;
    let detail = format!(
        "population bound {}; success {}/{}; median/((n+1) n ln n) [{}]; max/min {ratio:.2} (<= 4)",
        overflow.unwrap_or_else(|| "held".into()),
        successes,
        table.rows.len(),
        fmt_list(&normalized)
    );
    (Verdict::new(passed, detail), table)
}

/// Reruns each plan on a different worker count and compares evaluations row by row.
fn determinism(runs: &[(&str, &ExperimentPlan, &TrialTable)]) -> Verdict {
    let other_workers = if workers() == 1 { 2 } else { 1 };
    let mut rows = 0;
    let mut mismatches = Vec::new();
    for (name, plan, first) in runs {
        let again = run_plan(plan, other_workers).expect("valid plan");
        for (a, b) in first.rows.iter().zip(&again.rows) {
            rows += 1;
            if a.result.evaluations != b.result.evaluations || a.result.seed != b.result.seed {
                mismatches.push(format!("{name} cell {} trial {}", a.cell_index, a.trial));
            }
        }
        if first.rows.len() != again.rows.len() {
            mismatches.push(format!("{name}: row count differs"));
        }
    }
    let detail = match mismatches.first() {
        None => format!("{rows} rows reproduced exactly"),
        Some(m) => format!("{} mismatches; first: {m}", mismatches.len()),
    };
    Verdict::new(mismatches.is_empty(), detail)
}

fn report(id: usize, name: &str, start: Instant, v: &Verdict) {
    println!(
        "criterion {id} {}: {name}: {} [{:.1}s]",
        if v.passed { "PASS" } else { "FAIL" },
        v.detail,
        start.elapsed().as_secs_f64()
    );
}

fn main() -> ExitCode {
    let mut all = true;
    let mut record = |id: usize, name: &str, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = f();
        report(id, name, start, &v);
        all &= v.passed;
    };
    record(1, "pareto fronts match enumeration", &mut fronts);
    record(2, "non-dominated vectors survive selection", &mut preservation);
    record(3, "truncation removes a minimal individual", &mut truncation);
    record(4, "dominance and fitness match brute force", &mut dominance);

    let (omm, lotz, ojzj, gsemo) = (omm_plan(), lotz_plan(), ojzj_plan(), gsemo_plan());
    let mut tables = Vec::new();
    record(5, "OneMinMax scaling", &mut || {
        let (v, t) = omm_scaling(&omm);
        tables.push(("omm", t));
        v
    });
    record(6, "LOTZ scaling", &mut || {
        let (v, t) = lotz_scaling(&lotz);
        tables.push(("lotz", t));
        v
    });
    record(7, "OneJumpZeroJump scaling", &mut || {
        let (v, t) = ojzj_scaling(&ojzj);
        tables.push(("ojzj", t));
        v
    });
    record(8, "GSEMO on OneMinMax", &mut || {
        let (v, t) = gsemo_consistency(&gsemo);
        tables.push(("gsemo", t));
        v
    });
    let plans = [&omm, &lotz, &ojzj, &gsemo];
    let runs: Vec<(&str, &ExperimentPlan, &TrialTable)> =
        tables.iter().zip(plans).map(|((name, t), p)| (*name, p, t)).collect();
    record(9, "seeded reruns reproduce evaluations", &mut || determinism(&runs));

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
