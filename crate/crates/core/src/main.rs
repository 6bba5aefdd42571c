use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use moea_core::harness::{self, Algorithm, CellConfig, ExperimentPlan, OutputFormat, TrialTable};
use moea_core::problems::{pareto_front_iter, pareto_front_size, Family, ProblemSpec};
use moea_core::{oracle, DensityK, Error, MutationOperator};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "moea",
    version,
    about = "SPEA2 and GSEMO/SEMO on scalable many-objective benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration for a number of seeded trials.
    Run(RunArgs),
    /// Run every cell of a TOML experiment plan.
    Sweep(SweepArgs),
    /// Cross-check the implementation against brute-force oracles.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the Pareto front of an instance and its size.
    Front(ProblemArgs),
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long, value_parser = parse_with::<Family>)]
    problem: Family,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: Option<usize>,
}

impl ProblemArgs {
    fn spec(&self) -> moea_core::Result<ProblemSpec> {
        ProblemSpec::new(self.problem, self.m, self.n, self.k)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; rows go to stdout as CSV when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to the extension of --out.
    #[arg(long, value_parser = parse_with::<OutputFormat>)]
    format: Option<OutputFormat>,
    /// Worker threads; MOEA_WORKERS takes precedence.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_with::<Algorithm>)]
    algorithm: Algorithm,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Offspring population size; defaults to the archive size.
    #[arg(long)]
    mu: Option<usize>,
    /// Archive size; defaults to the largest non-dominated set.
    #[arg(long)]
    archive: Option<usize>,
    #[arg(long, value_parser = parse_with::<MutationOperator>)]
    mutation: Option<MutationOperator>,
    #[arg(long, value_parser = parse_with::<DensityK>, default_value = "auto")]
    density_k: DensityK,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    plan: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_with<T>(s: &str) -> Result<T, String>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidInstance(_)
            | Error::LengthMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::InvalidCell { .. }
            | Error::Plan { .. }
            | Error::Overflow(_)
    )
}

fn workers(flag: Option<usize>) -> Result<usize, Error> {
    if let Ok(v) = std::env::var("MOEA_WORKERS") {
        return v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&w| w > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("MOEA_WORKERS must be a positive integer, got '{v}'")));
    }
    match flag {
        Some(0) => Err(Error::InvalidArgument("--workers must be positive".into())),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn summarize(table: &TrialTable) {
    for s in table.aggregates() {
        let c = &table.cells[s.cell_index];
        let median = s.median_evaluations.map_or("-".to_string(), |m| format!("{m:.0}"));
        eprintln!(
            "cell {}: {} {} mu={} archive={}  success {}/{}  median evaluations {}",
            s.cell_index, c.algorithm, c.spec, c.mu, c.archive, s.successes, s.trials, median
        );
    }
}

fn execute(plan: &ExperimentPlan, output: &OutputArgs) -> Result<(), Error> {
    let table = harness::run_plan(plan, workers(output.workers)?)?;
    match &output.out {
        Some(path) => {
            let format = output.format.unwrap_or_else(|| OutputFormat::from_path(path));
            table.emit(format, path)?;
        }
        None => {
            let stdout = io::stdout().lock();
            let written = match output.format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => harness::write_csv(&table, stdout).map_err(|e| Error::Serialize(e.to_string())),
                OutputFormat::Json => harness::write_json(&table, stdout).map_err(|e| Error::Serialize(e.to_string())),
            };
            written?;
        }
    }
    summarize(&table);
    Ok(())
}

fn run(args: &RunArgs) -> Result<(), Error> {
    let spec = args.problem.spec()?;
    let mut cell = CellConfig::new(args.algorithm, &spec);
    cell.mu = args.mu;
    cell.archive = args.archive;
    cell.mutation = args.mutation;
    cell.density_k = args.density_k;
    cell.budget = args.budget;
    let plan = ExperimentPlan::new(args.seed, args.trials, vec![cell]);
    execute(&plan, &args.output)
}

fn front(args: &ProblemArgs) -> Result<(), Error> {
    let spec = args.spec()?;
    let size = pareto_front_size(&spec)?;
    let points = pareto_front_iter(&spec)?;
    let mut out = io::BufWriter::new(io::stdout().lock());
    let write = || -> io::Result<()> {
        for point in points {
            writeln!(out, "{point:?}")?;
        }
        writeln!(out, "size: {size}")?;
        out.flush()
    };
    write().map_err(|source| Error::Io {
        path: Path::new("<stdout>").to_path_buf(),
        source,
    })
}

fn verify(seed: u64) -> bool {
    let outcomes = oracle::cross_check_all(seed);
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    outcomes.iter().all(|o| o.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => match ExperimentPlan::from_path(&args.plan) {
            Ok(plan) => execute(&plan, &args.output),
            Err(e) => {
                // an unreadable plan is a bad argument
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
        },
        Command::Verify { seed } => {
            return if verify(*seed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILURE)
            };
        }
        Command::Front(args) => front(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage_error(&e) {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_FAILURE)
            }
        }
    }
}
