use serde::{Deserialize, Serialize};

/// Coverage after a given generation. A trace stores only the generations at
/// which the covered count changed; coverage is constant in between.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveragePoint {
    pub generation: u64,
    pub covered: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageTrace {
    pub front_size: usize,
    pub points: Vec<CoveragePoint>,
}

impl CoverageTrace {
    pub fn new(front_size: usize) -> Self {
        CoverageTrace {
            front_size,
            points: Vec::new(),
        }
    }

    pub fn record(&mut self, generation: u64, covered: usize) {
        if self.points.last().map(|p| p.covered) != Some(covered) {
            self.points.push(CoveragePoint { generation, covered });
        }
    }

    /// Coverage fraction in effect after `generation`.
    pub fn coverage_at(&self, generation: u64) -> f64 {
        let idx = self.points.partition_point(|p| p.generation <= generation);
        match idx {
            0 => 0.0,
            i => self.points[i - 1].covered as f64 / self.front_size as f64,
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[0].covered <= w[1].covered)
    }
}

/// Outcome of one seeded run of any of the algorithms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub evaluations: u64,
    pub generations: u64,
    pub success: bool,
    pub final_coverage: f64,
    pub wall_time_ms: u64,
    pub seed: u64,
    /// Largest archive (SPEA2) or population (SEMO/GSEMO) seen during the run.
    pub peak_population: usize,
    pub trace: CoverageTrace,
}

impl RunResult {
    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &RunResult) -> bool {
        RunResult {
            wall_time_ms: 0,
            ..self.clone()
        } == RunResult {
            wall_time_ms: 0,
            ..other.clone()
        }
    }
}
