use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ExperimentPlan, TrialRow, TrialTable};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 15] = [
    "algorithm",
    "problem",
    "m",
    "n",
    "k",
    "mu",
    "archive",
    "mutation",
    "density_k",
    "seed",
    "evaluations",
    "generations",
    "success",
    "final_coverage",
    "wall_ms",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// Guesses from the file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::invalid(format!("unknown output format '{other}'"))),
        }
    }
}

/// Fixed-point text with six significant digits.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.5}");
    }
    let mut magnitude = x.abs().log10().floor() as i32;
    let decimals = |mag: i32| (5 - mag).max(0) as usize;
    let d = decimals(magnitude);
    // rounding may carry into a new leading digit
    let rounded: f64 = format!("{x:.d$}").parse().unwrap_or(x);
    if rounded.abs() >= 10f64.powi(magnitude + 1) {
        magnitude += 1;
    }
    let d = decimals(magnitude);
    format!("{x:.d$}")
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_record(row: &TrialRow) -> [String; 15] {
    let c = &row.cell;
    let r = &row.result;
    [
        c.algorithm.to_string(),
        c.spec.family().short_name().to_string(),
        c.spec.m().to_string(),
        c.spec.n().to_string(),
        c.spec.k().map(|k| k.to_string()).unwrap_or_default(),
        c.mu.to_string(),
        c.archive.to_string(),
        c.mutation.to_string(),
        c.density_k.to_string(),
        r.seed.to_string(),
        r.evaluations.to_string(),
        r.generations.to_string(),
        r.success.to_string(),
        format_sig6(r.final_coverage),
        r.wall_time_ms.to_string(),
    ]
}

/// Header plus one line per trial, LF line endings.
pub fn write_csv<W: Write>(table: &TrialTable, out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in &table.rows {
        w.write_record(csv_record(row))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct JsonRow {
    pub cell: usize,
    pub trial: usize,
    pub algorithm: String,
    pub problem: String,
    pub m: usize,
    pub n: usize,
    pub k: Option<usize>,
    pub mu: usize,
    pub archive: usize,
    pub mutation: String,
    pub density_k: String,
    pub budget: u64,
    pub seed: u64,
    pub evaluations: u64,
    pub generations: u64,
    pub success: bool,
    pub final_coverage: f64,
    pub wall_ms: u64,
}

impl From<&TrialRow> for JsonRow {
    fn from(row: &TrialRow) -> Self {
        let c = &row.cell;
        let r = &row.result;
        JsonRow {
            cell: row.cell_index,
            trial: row.trial,
            algorithm: c.algorithm.to_string(),
            problem: c.spec.family().short_name().to_string(),
            m: c.spec.m(),
            n: c.spec.n(),
            k: c.spec.k(),
            mu: c.mu,
            archive: c.archive,
            mutation: c.mutation.to_string(),
            density_k: c.density_k.to_string(),
            budget: c.budget,
            seed: r.seed,
            evaluations: r.evaluations,
            generations: r.generations,
            success: r.success,
            final_coverage: r.final_coverage,
            wall_ms: r.wall_time_ms,
        }
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct JsonMeta {
    pub tool: String,
    pub version: String,
    pub plan: ExperimentPlan,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct JsonDocument {
    pub meta: JsonMeta,
    pub rows: Vec<JsonRow>,
}

/// `{"meta": {...}, "rows": [...]}` with the plan embedded in `meta`.
pub fn write_json<W: Write>(table: &TrialTable, out: W) -> serde_json::Result<()> {
    let doc = JsonDocument {
        meta: JsonMeta {
            tool: "moea".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            plan: table.plan.clone(),
        },
        rows: table.rows.iter().map(JsonRow::from).collect(),
    };
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n").map_err(serde_json::Error::io)
}

impl TrialTable {
    pub fn emit(&self, format: OutputFormat, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(io_error(path))?;
        let mut out = BufWriter::new(file);
        match format {
            OutputFormat::Csv => write_csv(self, &mut out).map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(source) => Error::Io {
                    path: path.to_path_buf(),
                    source,
                },
                other => Error::Serialize(format!("{other:?}")),
            })?,
            OutputFormat::Json => write_json(self, &mut out).map_err(|e| match e.io_error_kind() {
                Some(kind) => Error::Io {
                    path: path.to_path_buf(),
                    source: std::io::Error::new(kind, e.to_string()),
                },
                None => Error::Serialize(e.to_string()),
            })?,
        }
        out.flush().map_err(io_error(path))
    }
}
