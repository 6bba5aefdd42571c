use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baseline::BaselineAlgorithm;
use crate::bounds;
use crate::error::{Error, Result};
use crate::problems::{required_archive_size, Family, ProblemSpec};
use crate::spea2::{DensityK, MutationOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Spea2,
    Gsemo,
    Semo,
}

impl Algorithm {
    pub fn baseline(self) -> Option<BaselineAlgorithm> {
        match self {
            Algorithm::Spea2 => None,
            Algorithm::Gsemo => Some(BaselineAlgorithm::Gsemo),
            Algorithm::Semo => Some(BaselineAlgorithm::Semo),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Spea2 => "spea2",
            Algorithm::Gsemo => "gsemo",
            Algorithm::Semo => "semo",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spea2" => Ok(Algorithm::Spea2),
            "gsemo" => Ok(Algorithm::Gsemo),
            "semo" => Ok(Algorithm::Semo),
            other => Err(Error::invalid(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// One grid cell as written in a plan file. Omitted sizes default to the
/// required archive size of the instance, with μ = μ̄.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellConfig {
    pub algorithm: Algorithm,
    pub problem: Family,
    pub m: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub archive: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation: Option<MutationOperator>,
    #[serde(default)]
    pub density_k: DensityK,
    /// Absolute evaluation budget; overrides the plan's multiplier.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

impl CellConfig {
    pub fn new(algorithm: Algorithm, spec: &ProblemSpec) -> Self {
        CellConfig {
            algorithm,
            problem: spec.family(),
            m: spec.m(),
            n: spec.n(),
            k: spec.k(),
            mu: None,
            archive: None,
            mutation: None,
            density_k: DensityK::Auto,
            budget: None,
        }
    }

    pub fn with_sizes(mut self, mu: usize, archive: usize) -> Self {
        self.mu = Some(mu);
        self.archive = Some(archive);
        self
    }

    fn resolve(&self, budget_multiplier: f64) -> std::result::Result<Cell, String> {
        let spec = ProblemSpec::new(self.problem, self.m, self.n, self.k).map_err(|e| e.to_string())?;
        let required = required_archive_size(&spec).map_err(|e| e.to_string())?;
        let (mu, archive, mutation) = match self.algorithm.baseline() {
            None => {
                let archive = match self.archive {
                    Some(a) => a,
                    None => usize::try_from(required).map_err(|_| "required archive size too large".to_string())?,
                };
                let mu = self.mu.unwrap_or(archive);
                if mu == 0 || archive == 0 {
                    return Err("mu and archive must be positive".into());
                }
                (mu, archive, self.mutation.unwrap_or_default())
            }
            Some(b) => {
                if self.mu.is_some() || self.archive.is_some() {
                    return Err(format!("{} has no mu or archive parameter", self.algorithm));
                }
                if let Some(m) = self.mutation {
                    if m != b.mutation() {
                        return Err(format!("{} always uses {} mutation", self.algorithm, b.mutation()));
                    }
                }
                // the population grows up to the largest mutually non-dominated set
                let pop = usize::try_from(required).map_err(|_| "population bound too large".to_string())?;
                (pop, pop, b.mutation())
            }
        };
        let budget = match self.budget {
            Some(b) => b,
            None => match self.algorithm {
                Algorithm::Spea2 => bounds::default_budget(&spec, mu.max(archive) as f64, mu as u64, budget_multiplier),
                _ => bounds::default_budget(&spec, mu as f64, 1, budget_multiplier),
            },
        };
        let step = if self.algorithm == Algorithm::Spea2 {
            mu as u64
        } else {
            1
        };
        if budget < step {
            return Err(format!("budget {budget} is smaller than one generation of {step}"));
        }
        Ok(Cell {
            algorithm: self.algorithm,
            spec,
            mu,
            archive,
            mutation,
            density_k: self.density_k,
            budget,
        })
    }
}

/// A validated cell. For SEMO/GSEMO, `mu` and `archive` both hold the
/// largest possible population size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub algorithm: Algorithm,
    pub spec: ProblemSpec,
    pub mu: usize,
    pub archive: usize,
    pub mutation: MutationOperator,
    pub density_k: DensityK,
    pub budget: u64,
}

fn default_multiplier() -> f64 {
    100.0
}

/// A grid of cells, each run `trials_per_cell` times with seeds derived from
/// (master_seed, cell index, trial index).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub master_seed: u64,
    pub trials_per_cell: usize,
    /// Default budget as a multiple of the runtime bound.
    #[serde(default = "default_multiplier")]
    pub budget_multiplier: f64,
    pub cells: Vec<CellConfig>,
}

impl ExperimentPlan {
    pub fn new(master_seed: u64, trials_per_cell: usize, cells: Vec<CellConfig>) -> Self {
        ExperimentPlan {
            master_seed,
            trials_per_cell,
            budget_multiplier: default_multiplier(),
            cells,
        }
    }

    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Plan {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, path)
    }

    /// Resolves every cell, failing on the first invalid one.
    pub fn validate(&self) -> Result<Vec<Cell>> {
        if self.trials_per_cell == 0 {
            return Err(Error::invalid("trials_per_cell must be positive"));
        }
        if !(self.budget_multiplier > 0.0 && self.budget_multiplier.is_finite()) {
            return Err(Error::invalid("budget_multiplier must be positive"));
        }
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.resolve(self.budget_multiplier)
                    .map_err(|message| Error::InvalidCell { cell: i, message })
            })
            .collect()
    }
}
