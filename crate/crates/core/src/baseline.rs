//! SEMO and GSEMO: one offspring per iteration, and a population holding
//! exactly the non-dominated objective vectors found so far, one individual
//! each.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::{random_bitstring, RandomSource};
use crate::bounds;
use crate::dominance::{weakly_dominates, HasObjectives};
use crate::error::{Error, Result};
use crate::problems::{required_archive_size, ObjectiveVector, ProblemSpec};
use crate::run_result::{CoverageTrace, RunResult};
use crate::spea2::{Individual, MutationOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineAlgorithm {
    Semo,
    Gsemo,
}

impl BaselineAlgorithm {
    /// SEMO flips one bit, GSEMO flips each bit with probability 1/n.
    pub fn mutation(self) -> MutationOperator {
        match self {
            BaselineAlgorithm::Semo => MutationOperator::OneBit,
            BaselineAlgorithm::Gsemo => MutationOperator::BitWise,
        }
    }
}

impl fmt::Display for BaselineAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineAlgorithm::Semo => "semo",
            BaselineAlgorithm::Gsemo => "gsemo",
        })
    }
}

impl FromStr for BaselineAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "semo" => Ok(BaselineAlgorithm::Semo),
            "gsemo" => Ok(BaselineAlgorithm::Gsemo),
            other => Err(Error::invalid(format!("unknown baseline '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineConfig {
    pub spec: ProblemSpec,
    pub algorithm: BaselineAlgorithm,
    pub budget: u64,
    pub seed: u64,
}

impl BaselineConfig {
    pub fn new(spec: ProblemSpec, algorithm: BaselineAlgorithm) -> Self {
        BaselineConfig {
            spec,
            algorithm,
            budget: Self::default_budget(&spec),
            seed: 0,
        }
    }

    /// 100 times the runtime bound with μ the largest possible population.
    pub fn default_budget(spec: &ProblemSpec) -> u64 {
        let population = required_archive_size(spec).map(|s| s as f64).unwrap_or(f64::MAX);
        bounds::default_budget(spec, population, 1, 100.0)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

/// A running SEMO/GSEMO instance.
pub struct Semo<'f> {
    config: BaselineConfig,
    front: &'f HashSet<ObjectiveVector>,
    rng: RandomSource,
    population: Vec<Individual>,
    index: HashMap<ObjectiveVector, usize>,
    covered: usize,
    iterations: u64,
    evaluations: u64,
}

impl<'f> Semo<'f> {
    pub fn new(config: BaselineConfig, front: &'f HashSet<ObjectiveVector>) -> Result<Self> {
        if config.budget < 1 {
            return Err(Error::invalid("budget must allow at least one evaluation"));
        }
        if front.is_empty() {
            return Err(Error::invalid("target front is empty"));
        }
        let mut rng = RandomSource::new(config.seed);
        let first = Individual::new(&config.spec, random_bitstring(config.spec.n(), &mut rng)?)?;
        let covered = usize::from(front.contains(first.objectives()));
        let index = HashMap::from([(first.objectives().clone(), 0)]);
        Ok(Semo {
            config,
            front,
            rng,
            population: vec![first],
            index,
            covered,
            iterations: 0,
            evaluations: 1,
        })
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn covered(&self) -> usize {
        self.covered
    }

    /// One iteration: mutate a uniform parent and merge the child. Returns
    /// whether the child entered the population.
    pub fn step(&mut self) -> Result<bool> {
        let parent = self.rng.random_range(0..self.population.len());
        let genotype = self
            .config
            .algorithm
            .mutation()
            .apply(self.population[parent].genotype(), &mut self.rng);
        let child = Individual::new(&self.config.spec, genotype)?;
        self.evaluations += 1;
        self.iterations += 1;
        Ok(self.insert(child))
    }

    fn insert(&mut self, child: Individual) -> bool {
        let fc = child.objectives();
        // an equal vector keeps the incumbent
        if self.index.contains_key(fc) || self.population.iter().any(|p| weakly_dominates(p.objectives(), fc)) {
            return false;
        }
        let before = self.population.len();
        self.population.retain(|p| !weakly_dominates(fc, p.objectives()));
        if self.population.len() != before {
            self.covered = self
                .population
                .iter()
                .filter(|p| self.front.contains(p.objectives()))
                .count();
        }
        if self.front.contains(fc) {
            self.covered += 1;
        }
        self.population.push(child);
        self.index = self
            .population
            .iter()
            .enumerate()
            .map(|(i, p)| (p.objectives().clone(), i))
            .collect();
        true
    }

    pub fn run(self) -> Result<RunResult> {
        self.run_observed(|_| {})
    }

    /// Runs to coverage or budget, calling `observer` with the population
    /// after every iteration.
    pub fn run_observed<F: FnMut(&[Individual])>(mut self, mut observer: F) -> Result<RunResult> {
        let start = Instant::now();
        let mut trace = CoverageTrace::new(self.front.len());
        let mut peak = self.population.len();
        observer(&self.population);
        trace.record(0, self.covered);
        while self.covered < self.front.len() && self.evaluations < self.config.budget {
            self.step()?;
            peak = peak.max(self.population.len());
            observer(&self.population);
            trace.record(self.iterations, self.covered);
        }
        Ok(RunResult {
            evaluations: self.evaluations,
            generations: self.iterations,
            success: self.covered == self.front.len(),
            final_coverage: self.covered as f64 / self.front.len() as f64,
            wall_time_ms: start.elapsed().as_millis() as u64,
            seed: self.config.seed,
            peak_population: peak,
            trace,
        })
    }
}

pub fn baseline_run(config: &BaselineConfig, front: &HashSet<ObjectiveVector>) -> Result<RunResult> {
    Semo::new(config.clone(), front)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::dominates;
    use crate::problems::pareto_front;

    fn check_population(pop: &[Individual]) {
        for (i, a) in pop.iter().enumerate() {
            for b in &pop[i + 1..] {
                assert_ne!(a.objectives(), b.objectives());
                assert!(!dominates(a.objectives(), b.objectives()));
                assert!(!dominates(b.objectives(), a.objectives()));
            }
        }
    }

    #[test]
    fn population_stays_mutually_nondominated() {
        for spec in [
            ProblemSpec::lotz(2, 10).unwrap(),
            ProblemSpec::lotz(4, 8).unwrap(),
            ProblemSpec::ojzj(2, 8, 2).unwrap(),
        ] {
            let front = pareto_front(&spec).unwrap();
            for alg in [BaselineAlgorithm::Semo, BaselineAlgorithm::Gsemo] {
                let cfg = BaselineConfig::new(spec, alg).with_seed(17).with_budget(20_000);
                let mut seen_front: HashSet<ObjectiveVector> = HashSet::new();
                Semo::new(cfg, &front)
                    .unwrap()
                    .run_observed(|pop| {
                        check_population(pop);
                        let now: HashSet<_> = pop.iter().map(|p| p.objectives().clone()).collect();
                        // front points never disappear once found
                        assert!(seen_front.is_subset(&now));
                        seen_front.extend(now.into_iter().filter(|v| front.contains(v)));
                    })
                    .unwrap();
            }
        }
    }

    #[test]
    fn gsemo_omm_population_bounded_by_front() {
        let spec = ProblemSpec::one_min_max(2, 16).unwrap();
        let front = pareto_front(&spec).unwrap();
        for seed in 0..10 {
            let cfg = BaselineConfig::new(spec, BaselineAlgorithm::Gsemo).with_seed(seed);
            let r = Semo::new(cfg, &front)
                .unwrap()
                .run_observed(|pop| assert!(pop.len() <= 17))
                .unwrap();
            assert!(r.success);
            assert_eq!(r.evaluations, r.generations + 1);
        }
    }

    #[test]
    fn budget_limits() {
        let spec = ProblemSpec::lotz(2, 20).unwrap();
        let front = pareto_front(&spec).unwrap();
        let cfg = BaselineConfig::new(spec, BaselineAlgorithm::Semo).with_budget(50);
        let r = baseline_run(&cfg, &front).unwrap();
        assert!(!r.success);
        assert_eq!(r.evaluations, 50);
        assert!(baseline_run(&cfg.clone().with_budget(0), &front).is_err());
    }

    #[test]
    fn deterministic_under_seed() {
        let spec = ProblemSpec::lotz(2, 8).unwrap();
        let front = pareto_front(&spec).unwrap();
        let cfg = BaselineConfig::new(spec, BaselineAlgorithm::Gsemo).with_seed(99);
        assert!(baseline_run(&cfg, &front)
            .unwrap()
            .same_outcome(&baseline_run(&cfg, &front).unwrap()));
    }
}
