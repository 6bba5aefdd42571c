//! SPEA2 with uniform parent selection and mutation-only variation.
//!
//! Each generation builds A' from the non-dominated members of P ∪ A. An
//! oversized A' is shrunk by the distance-based truncation operator; an
//! undersized one is filled with the dominated members of lowest fitness F.
//! The next P is μ mutants of uniformly chosen archive members.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bitstring::{bitwise_mutate, onebit_mutate, random_bitstring, Bitstring, RandomSource};
use crate::bounds;
use crate::dominance::{assign_fitness, nondominated_indices, HasObjectives};
use crate::error::{Error, Result};
use crate::problems::{evaluate, ObjectiveVector, ProblemSpec};
use crate::run_result::{CoverageTrace, RunResult};

/// A genotype together with its objective vector, evaluated once at creation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Individual {
    genotype: Bitstring,
    objectives: ObjectiveVector,
}

impl Individual {
    pub fn new(spec: &ProblemSpec, genotype: Bitstring) -> Result<Self> {
        let objectives = evaluate(spec, &genotype)?;
        Ok(Individual { genotype, objectives })
    }

    pub fn genotype(&self) -> &Bitstring {
        &self.genotype
    }
}

impl HasObjectives for Individual {
    fn objectives(&self) -> &ObjectiveVector {
        &self.objectives
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MutationOperator {
    #[default]
    #[serde(rename = "bitwise")]
    BitWise,
    #[serde(rename = "onebit")]
    OneBit,
}

impl MutationOperator {
    pub fn apply(self, x: &Bitstring, rng: &mut RandomSource) -> Bitstring {
        match self {
            MutationOperator::BitWise => bitwise_mutate(x, rng),
            MutationOperator::OneBit => onebit_mutate(x, rng),
        }
    }
}

impl fmt::Display for MutationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MutationOperator::BitWise => "bitwise",
            MutationOperator::OneBit => "onebit",
        })
    }
}

impl FromStr for MutationOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bitwise" => Ok(MutationOperator::BitWise),
            "onebit" => Ok(MutationOperator::OneBit),
            other => Err(Error::invalid(format!("unknown mutation '{other}'"))),
        }
    }
}

/// Neighbour index k used by the density term of the fill step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DensityK {
    /// floor(sqrt(|P ∪ A|))
    #[default]
    Auto,
    Fixed(usize),
}

impl DensityK {
    /// The k to use on a pool of `pool_len` members, clamped to [1, pool_len-1].
    pub fn resolve(self, pool_len: usize) -> usize {
        let k = match self {
            DensityK::Auto => (pool_len as f64).sqrt().floor() as usize,
            DensityK::Fixed(k) => k,
        };
        k.clamp(1, pool_len.saturating_sub(1).max(1))
    }
}

impl fmt::Display for DensityK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityK::Auto => f.write_str("auto"),
            DensityK::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for DensityK {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(DensityK::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(DensityK::Fixed(k)),
            _ => Err(Error::invalid(format!(
                "density k must be 'auto' or a positive integer, got '{s}'"
            ))),
        }
    }
}

impl Serialize for DensityK {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DensityK::Auto => s.serialize_str("auto"),
            DensityK::Fixed(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for DensityK {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(k) if k >= 1 => Ok(DensityK::Fixed(k as usize)),
            Repr::Int(k) => Err(serde::de::Error::custom(format!("density k must be >= 1, got {k}"))),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    pub spec: ProblemSpec,
    /// Offspring population size μ.
    pub mu: usize,
    /// Archive size μ̄.
    pub archive_cap: usize,
    pub mutation: MutationOperator,
    pub density_k: DensityK,
    /// Maximum number of fitness evaluations.
    pub budget: u64,
    pub seed: u64,
}

impl EngineConfig {
    /// Bit-wise mutation, automatic density k, seed 0, and the default budget.
    pub fn new(spec: ProblemSpec, mu: usize, archive_cap: usize) -> Self {
        EngineConfig {
            spec,
            mu,
            archive_cap,
            mutation: MutationOperator::BitWise,
            density_k: DensityK::Auto,
            budget: Self::default_budget(&spec, mu, archive_cap),
            seed: 0,
        }
    }

    /// 100 times the runtime bound at population max(μ, μ̄), in whole generations.
    pub fn default_budget(spec: &ProblemSpec, mu: usize, archive_cap: usize) -> u64 {
        bounds::default_budget(spec, mu.max(archive_cap) as f64, mu.max(1) as u64, 100.0)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_mutation(mut self, mutation: MutationOperator) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn with_density_k(mut self, density_k: DensityK) -> Self {
        self.density_k = density_k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu == 0 {
            return Err(Error::invalid("population size mu must be positive"));
        }
        if self.archive_cap == 0 {
            return Err(Error::invalid("archive size must be positive"));
        }
        if self.budget < self.mu as u64 {
            return Err(Error::invalid(format!(
                "budget {} is smaller than one population of {}",
                self.budget, self.mu
            )));
        }
        if let DensityK::Fixed(0) = self.density_k {
            return Err(Error::invalid("density k must be positive"));
        }
        Ok(())
    }
}

fn squared_distances<T: HasObjectives>(x: usize, members: &[T]) -> Result<Vec<u64>> {
    if members.len() < 2 {
        return Err(Error::invalid("distance vectors need at least two members"));
    }
    let fx = members[x].objectives();
    let mut d: Vec<u64> = members
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != x)
        .map(|(_, y)| fx.squared_distance(y.objectives()))
        .collect();
    d.sort_unstable();
    Ok(d)
}

/// Ascending distances from `members[x]` to every other member; entry k-1 is σᵏ.
pub fn sigma_vector<T: HasObjectives>(x: usize, members: &[T]) -> Result<Vec<f64>> {
    Ok(squared_distances(x, members)?
        .into_iter()
        .map(|d| (d as f64).sqrt())
        .collect())
}

/// `members[x] ≤_d members[y]`: the sigma vectors are equal, or x's is
/// smaller at the first index where they differ.
pub fn less_d<T: HasObjectives>(x: usize, y: usize, members: &[T]) -> Result<bool> {
    let sx = squared_distances(x, members)?;
    let sy = squared_distances(y, members)?;
    Ok(sx <= sy)
}

/// Distance-based truncation over groups of members sharing an objective
/// vector.
///
/// Members of one group have identical sigma vectors: `count - 1` zeros
/// followed by each other group's distance repeated by that group's size. The
/// comparison walks these run-length encoded sequences, so a removal costs
/// one scan over the live groups instead of a full recomputation.
struct GroupTruncation {
    members: Vec<Vec<usize>>,
    dist: Vec<u64>,
    neighbours: Vec<Vec<u32>>,
    groups: usize,
    total: usize,
}

impl GroupTruncation {
    fn new<T: HasObjectives>(candidates: &[T]) -> Self {
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by(|&a, &b| candidates[a].objectives().cmp(candidates[b].objectives()));
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut reps: Vec<usize> = Vec::new();
        for i in order {
            match reps.last() {
                Some(&r) if candidates[r].objectives() == candidates[i].objectives() => {
                    members.last_mut().expect("group exists").push(i)
                }
                _ => {
                    reps.push(i);
                    members.push(vec![i]);
                }
            }
        }
        let g = reps.len();
        let mut dist = vec![0u64; g * g];
        for a in 0..g {
            for b in a + 1..g {
                let d = candidates[reps[a]]
                    .objectives()
                    .squared_distance(candidates[reps[b]].objectives());
                dist[a * g + b] = d;
                dist[b * g + a] = d;
            }
        }
        let neighbours = (0..g)
            .map(|a| {
                let mut nb: Vec<u32> = (0..g as u32).filter(|&b| b as usize != a).collect();
                nb.sort_by_key(|&b| dist[a * g + b as usize]);
                nb
            })
            .collect();
        GroupTruncation {
            members,
            dist,
            neighbours,
            groups: g,
            total: candidates.len(),
        }
    }

    /// Runs of the sigma vector of a member of group `a`, as (squared distance, length).
    fn runs(&self, a: usize) -> impl Iterator<Item = (u64, usize)> + '_ {
        let dup = self.members[a].len() - 1;
        std::iter::once((0, dup)).chain(self.neighbours[a].iter().filter_map(move |&b| {
            let c = self.members[b as usize].len();
            (c > 0).then(|| (self.dist[a * self.groups + b as usize], c))
        }))
    }

    fn cmp_groups(&self, a: usize, b: usize) -> Ordering {
        let mut ra = self.runs(a).filter(|r| r.1 > 0);
        let mut rb = self.runs(b).filter(|r| r.1 > 0);
        let (mut ca, mut cb) = (ra.next(), rb.next());
        loop {
            match (ca, cb) {
                (Some((va, la)), Some((vb, lb))) => {
                    if va != vb {
                        return va.cmp(&vb);
                    }
                    let t = la.min(lb);
                    ca = if la == t { ra.next() } else { Some((va, la - t)) };
                    cb = if lb == t { rb.next() } else { Some((vb, lb - t)) };
                }
                // both sequences have `total - 1` entries
                _ => return Ordering::Equal,
            }
        }
    }

    fn remove_one(&mut self, rng: &mut RandomSource) -> usize {
        let mut best: Vec<usize> = Vec::new();
        for a in 0..self.groups {
            if self.members[a].is_empty() {
                continue;
            }
            match best.first().map(|&b| self.cmp_groups(a, b)) {
                None | Some(Ordering::Equal) => best.push(a),
                Some(Ordering::Less) => {
                    best.clear();
                    best.push(a);
                }
                Some(Ordering::Greater) => {}
            }
        }
        // uniform over the individuals of all minimal groups
        let weight: usize = best.iter().map(|&a| self.members[a].len()).sum();
        let mut r = rng.random_range(0..weight);
        let group = *best
            .iter()
            .find(|&&a| {
                let c = self.members[a].len();
                if r < c {
                    true
                } else {
                    r -= c;
                    false
                }
            })
            .expect("r < weight");
        self.total -= 1;
        self.members[group].swap_remove(r)
    }
}

/// Candidate indices in the order the truncation operator removes them
/// until `cap` remain.
pub fn truncation_order<T: HasObjectives>(candidates: &[T], cap: usize, rng: &mut RandomSource) -> Result<Vec<usize>> {
    if cap == 0 || cap >= candidates.len() {
        return Err(Error::invalid(format!(
            "truncation needs 1 <= cap < {} candidates, got cap {cap}",
            candidates.len()
        )));
    }
    let mut t = GroupTruncation::new(candidates);
    let mut removed = Vec::with_capacity(candidates.len() - cap);
    while t.total > cap {
        removed.push(t.remove_one(rng));
    }
    Ok(removed)
}

/// Indices (ascending) of the `cap` candidates that survive truncation.
pub fn truncate<T: HasObjectives>(candidates: &[T], cap: usize, rng: &mut RandomSource) -> Result<Vec<usize>> {
    let removed = truncation_order(candidates, cap, rng)?;
    let mut gone = vec![false; candidates.len()];
    for i in removed {
        gone[i] = true;
    }
    Ok((0..candidates.len()).filter(|&i| !gone[i]).collect())
}

/// Environmental selection on a pool P ∪ A, returning the indices of the
/// next archive: the non-dominated members (truncated to `cap` if needed),
/// then, if room remains, dominated members by ascending fitness with ties
/// shuffled.
pub fn select_archive<T: HasObjectives>(
    pool: &[T],
    cap: usize,
    density_k: DensityK,
    rng: &mut RandomSource,
) -> Result<Vec<usize>> {
    if cap == 0 {
        return Err(Error::invalid("archive size must be positive"));
    }
    let front = nondominated_indices(pool)?;
    match front.len().cmp(&cap) {
        Ordering::Greater => {
            let members: Vec<&T> = front.iter().map(|&i| &pool[i]).collect();
            Ok(truncate(&members, cap, rng)?.into_iter().map(|j| front[j]).collect())
        }
        Ordering::Equal => Ok(front),
        Ordering::Less if front.len() == pool.len() => Ok(front),
        Ordering::Less => {
            let records = assign_fitness(pool, density_k.resolve(pool.len()))?;
            let mut in_front = vec![false; pool.len()];
            for &i in &front {
                in_front[i] = true;
            }
            let mut dominated: Vec<usize> = (0..pool.len()).filter(|&i| !in_front[i]).collect();
            dominated.shuffle(rng);
            dominated.sort_by(|&a, &b| records[a].cmp_fitness(&records[b]));
            let room = cap - front.len();
            let mut archive = front;
            archive.extend(dominated.into_iter().take(room));
            Ok(archive)
        }
    }
}

/// Environmental selection over P ∪ A.
pub fn environmental_selection(
    population: Vec<Individual>,
    archive: Vec<Individual>,
    cap: usize,
    density_k: DensityK,
    rng: &mut RandomSource,
) -> Result<Vec<Individual>> {
    let pool: Vec<Individual> = population.into_iter().chain(archive).collect();
    let keep = select_archive(&pool, cap, density_k, rng)?;
    Ok(take_indices(pool, &keep))
}

fn take_indices(pool: Vec<Individual>, keep: &[usize]) -> Vec<Individual> {
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    keep.iter()
        .map(|&i| slots[i].take().expect("selection indices are distinct"))
        .collect()
}

/// μ offspring, each a mutant of a uniformly chosen archive member, together
/// with the index of each offspring's parent.
pub fn generate_offspring_traced(
    archive: &[Individual],
    mu: usize,
    mutation: MutationOperator,
    spec: &ProblemSpec,
    rng: &mut RandomSource,
) -> Result<(Vec<Individual>, Vec<usize>)> {
    if archive.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut offspring = Vec::with_capacity(mu);
    let mut parents = Vec::with_capacity(mu);
    for _ in 0..mu {
        let p = rng.random_range(0..archive.len());
        let child = mutation.apply(&archive[p].genotype, rng);
        offspring.push(Individual::new(spec, child)?);
        parents.push(p);
    }
    Ok((offspring, parents))
}

pub fn generate_offspring(
    archive: &[Individual],
    mu: usize,
    mutation: MutationOperator,
    spec: &ProblemSpec,
    rng: &mut RandomSource,
) -> Result<Vec<Individual>> {
    Ok(generate_offspring_traced(archive, mu, mutation, spec, rng)?.0)
}

/// Number of front points attained by some member.
pub fn covered_count<T: HasObjectives>(members: &[T], front: &HashSet<ObjectiveVector>) -> usize {
    members
        .iter()
        .map(|x| x.objectives())
        .filter(|v| front.contains(*v))
        .collect::<HashSet<_>>()
        .len()
}

/// Fraction of `front` attained by some member.
pub fn coverage<T: HasObjectives>(members: &[T], front: &HashSet<ObjectiveVector>) -> f64 {
    if front.is_empty() {
        return 0.0;
    }
    covered_count(members, front) as f64 / front.len() as f64
}

/// A SPEA2 run in progress. [`Spea2::run`] drives it to completion; tests
/// step it by hand through [`Spea2::select_observed`] and [`Spea2::breed`].
pub struct Spea2<'f> {
    config: EngineConfig,
    front: &'f HashSet<ObjectiveVector>,
    rng: RandomSource,
    population: Vec<Individual>,
    archive: Vec<Individual>,
    generation: u64,
    evaluations: u64,
}

impl<'f> Spea2<'f> {
    /// Validates the configuration and evaluates the initial population.
    pub fn new(config: EngineConfig, front: &'f HashSet<ObjectiveVector>) -> Result<Self> {
        config.validate()?;
        if front.is_empty() {
            return Err(Error::invalid("target front is empty"));
        }
        let mut rng = RandomSource::new(config.seed);
        let population = (0..config.mu)
            .map(|_| Individual::new(&config.spec, random_bitstring(config.spec.n(), &mut rng)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Spea2 {
            evaluations: config.mu as u64,
            config,
            front,
            rng,
            population,
            archive: Vec::new(),
            generation: 0,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn archive(&self) -> &[Individual] {
        &self.archive
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn covered(&self) -> usize {
        covered_count(&self.archive, self.front)
    }

    /// Environmental selection; A ← A'.
    pub fn select(&mut self) -> Result<()> {
        self.select_observed(|_, _| {})
    }

    /// Like [`Spea2::select`], showing `observer` the pool P ∪ A and the
    /// indices it keeps before the archive is replaced.
    pub fn select_observed<F>(&mut self, observer: F) -> Result<()>
    where
        F: FnOnce(&[Individual], &[usize]),
    {
        let pool: Vec<Individual> = std::mem::take(&mut self.population)
            .into_iter()
            .chain(std::mem::take(&mut self.archive))
            .collect();
        let keep = select_archive(&pool, self.config.archive_cap, self.config.density_k, &mut self.rng)?;
        observer(&pool, &keep);
        self.archive = take_indices(pool, &keep);
        Ok(())
    }

    /// Replaces P with μ offspring of the archive.
    pub fn breed(&mut self) -> Result<()> {
        self.population = generate_offspring(
            &self.archive,
            self.config.mu,
            self.config.mutation,
            &self.config.spec,
            &mut self.rng,
        )?;
        self.generation += 1;
        self.evaluations += self.config.mu as u64;
        Ok(())
    }

    /// Runs until the archive covers the front or no further generation fits
    /// in the budget.
    pub fn run(mut self) -> Result<RunResult> {
        let start = Instant::now();
        let mu = self.config.mu as u64;
        let mut trace = CoverageTrace::new(self.front.len());
        let mut peak = 0;
        let success = loop {
            self.select()?;
            peak = peak.max(self.archive.len());
            let covered = self.covered();
            trace.record(self.generation, covered);
            if covered == self.front.len() {
                break true;
            }
            if self.evaluations + mu > self.config.budget {
                break false;
            }
            self.breed()?;
        };
        debug_assert_eq!(self.evaluations, mu * (self.generation + 1));
        Ok(RunResult {
            evaluations: self.evaluations,
            generations: self.generation,
            success,
            final_coverage: trace.coverage_at(self.generation),
            wall_time_ms: start.elapsed().as_millis() as u64,
            seed: self.config.seed,
            peak_population: peak,
            trace,
        })
    }
}

/// One complete SPEA2 run against `front`.
pub fn run(config: &EngineConfig, front: &HashSet<ObjectiveVector>) -> Result<RunResult> {
    Spea2::new(config.clone(), front)?.run()
}
