//! SPEA2 with the archive-truncation operator, the GSEMO/SEMO baselines, and
//! the scalable many-objective benchmarks mOneMinMax, mLOTZ and
//! mOneJumpZeroJump.
//!
//! ```
//! use moea_core::{pareto_front, spea2, EngineConfig, ProblemSpec};
//!
//! let spec = ProblemSpec::one_min_max(2, 8).unwrap();
//! let front = pareto_front(&spec).unwrap();
//! let config = EngineConfig::new(spec, 9, 9).with_seed(1);
//! let result = spea2::run(&config, &front).unwrap();
//! assert!(result.success);
//! ```

pub mod baseline;
pub mod bitstring;
pub mod bounds;
pub mod dominance;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod problems;
pub mod run_result;
pub mod spea2;

pub use baseline::{baseline_run, BaselineAlgorithm, BaselineConfig, Semo};
pub use bitstring::{Bitstring, RandomSource};
pub use dominance::{compare, dominates, weakly_dominates, DominanceRelation, HasObjectives};
pub use error::{Error, Result};
pub use problems::{
    evaluate, pareto_front, pareto_front_size, required_archive_size, Family, ObjectiveVector, ProblemSpec,
};
pub use run_result::{CoverageTrace, RunResult};
pub use spea2::{DensityK, EngineConfig, Individual, MutationOperator, Spea2};
