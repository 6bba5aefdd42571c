//! Pareto dominance under maximization and SPEA2's fitness assignment:
//! strength S, raw fitness R, density 1/(σᵏ+2) and F = R + density.
//!
//! Pool operations take a slice and refer to members by index. Distances are
//! Euclidean in objective space and compared through their exact integer
//! squares.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::problems::ObjectiveVector;

/// Anything that carries an objective vector.
pub trait HasObjectives {
    fn objectives(&self) -> &ObjectiveVector;
}

impl HasObjectives for ObjectiveVector {
    fn objectives(&self) -> &ObjectiveVector {
        self
    }
}

impl<T: HasObjectives> HasObjectives for &T {
    fn objectives(&self) -> &ObjectiveVector {
        (*self).objectives()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DominanceRelation {
    Dominates,
    DominatedBy,
    Equal,
    Incomparable,
}

impl DominanceRelation {
    pub fn flip(self) -> Self {
        match self {
            DominanceRelation::Dominates => DominanceRelation::DominatedBy,
            DominanceRelation::DominatedBy => DominanceRelation::Dominates,
            other => other,
        }
    }
}

pub fn compare(u: &ObjectiveVector, v: &ObjectiveVector) -> Result<DominanceRelation> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    Ok(relation(u, v))
}

/// [`compare`] without the length check.
#[inline]
pub(crate) fn relation(u: &ObjectiveVector, v: &ObjectiveVector) -> DominanceRelation {
    let mut u_better = false;
    let mut v_better = false;
    for (a, b) in u.values().iter().zip(v.values()) {
        match a.cmp(b) {
            Ordering::Greater => u_better = true,
            Ordering::Less => v_better = true,
            Ordering::Equal => {}
        }
        if u_better && v_better {
            return DominanceRelation::Incomparable;
        }
    }
    match (u_better, v_better) {
        (true, false) => DominanceRelation::Dominates,
        (false, true) => DominanceRelation::DominatedBy,
        (false, false) => DominanceRelation::Equal,
        (true, true) => unreachable!(),
    }
}

/// u ≻ v
#[inline]
pub fn dominates(u: &ObjectiveVector, v: &ObjectiveVector) -> bool {
    relation(u, v) == DominanceRelation::Dominates
}

/// u ⪰ v
#[inline]
pub fn weakly_dominates(u: &ObjectiveVector, v: &ObjectiveVector) -> bool {
    u.values().iter().zip(v.values()).all(|(a, b)| a >= b)
}

fn check_pool<T: HasObjectives>(pool: &[T]) -> Result<()> {
    let first = pool.first().ok_or(Error::EmptyPool)?.objectives().len();
    for x in pool {
        if x.objectives().len() != first {
            return Err(Error::LengthMismatch {
                expected: first,
                actual: x.objectives().len(),
            });
        }
    }
    Ok(())
}

/// Indices of pool members no other member dominates. Members with equal
/// objective vectors are all kept.
pub fn nondominated_indices<T: HasObjectives>(pool: &[T]) -> Result<Vec<usize>> {
    check_pool(pool)?;
    let mut dominated = vec![false; pool.len()];
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            match relation(pool[i].objectives(), pool[j].objectives()) {
                DominanceRelation::Dominates => dominated[j] = true,
                DominanceRelation::DominatedBy => dominated[i] = true,
                _ => {}
            }
        }
    }
    Ok((0..pool.len()).filter(|&i| !dominated[i]).collect())
}

pub fn nondominated_subset<T: HasObjectives>(pool: &[T]) -> Result<Vec<&T>> {
    Ok(nondominated_indices(pool)?.into_iter().map(|i| &pool[i]).collect())
}

/// S(x): how many pool members `pool[x]` dominates.
pub fn strength<T: HasObjectives>(pool: &[T], x: usize) -> u32 {
    let fx = pool[x].objectives();
    pool.iter().filter(|y| dominates(fx, y.objectives())).count() as u32
}

/// R(x): the summed strength of every member dominating `pool[x]`.
pub fn raw_fitness<T: HasObjectives>(pool: &[T], x: usize) -> u64 {
    let fx = pool[x].objectives();
    (0..pool.len())
        .filter(|&y| dominates(pool[y].objectives(), fx))
        .map(|y| strength(pool, y) as u64)
        .sum()
}

/// Squared distance from `pool[x]` to its k-th nearest other member.
pub fn kth_nearest_squared<T: HasObjectives>(pool: &[T], x: usize, k: usize) -> Result<u64> {
    if k == 0 || k >= pool.len() {
        return Err(Error::invalid(format!(
            "neighbour index k = {k} outside [1, {}]",
            pool.len().saturating_sub(1)
        )));
    }
    let fx = pool[x].objectives();
    let mut d: Vec<u64> = pool
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != x)
        .map(|(_, y)| fx.squared_distance(y.objectives()))
        .collect();
    let (_, kth, _) = d.select_nth_unstable(k - 1);
    Ok(*kth)
}

#[inline]
fn density_from_squared(sigma_sq: u64) -> f64 {
    1.0 / ((sigma_sq as f64).sqrt() + 2.0)
}

/// 1/(σᵏ+2) with σᵏ the distance to the k-th nearest other member.
pub fn density<T: HasObjectives>(pool: &[T], x: usize, k: usize) -> Result<f64> {
    Ok(density_from_squared(kth_nearest_squared(pool, x, k)?))
}

/// F(x) = R(x) + 1/(σᵏ+2).
pub fn fitness<T: HasObjectives>(pool: &[T], x: usize, k: usize) -> Result<f64> {
    Ok(raw_fitness(pool, x) as f64 + density(pool, x, k)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitnessRecord {
    pub strength: u32,
    pub raw: u64,
    /// (σᵏ)², kept exact for tie detection.
    pub sigma_squared: u64,
    pub density: f64,
    pub fitness: f64,
}

impl FitnessRecord {
    /// Exact comparison of F. Since R is an integer and the density lies in
    /// (0, 1/2], F orders as R ascending, then σᵏ descending.
    pub fn cmp_fitness(&self, other: &FitnessRecord) -> Ordering {
        self.raw
            .cmp(&other.raw)
            .then(other.sigma_squared.cmp(&self.sigma_squared))
    }
}

/// Fitness of every pool member, sharing one pairwise dominance pass.
pub fn assign_fitness<T: HasObjectives>(pool: &[T], k: usize) -> Result<Vec<FitnessRecord>> {
    check_pool(pool)?;
    let s = pool.len();
    if k == 0 || k >= s {
        return Err(Error::invalid(format!(
            "neighbour index k = {k} outside [1, {}]",
            s.saturating_sub(1)
        )));
    }
    let mut strength = vec![0u32; s];
    let mut dominators: Vec<Vec<u32>> = vec![Vec::new(); s];
    for i in 0..s {
        for j in i + 1..s {
            match relation(pool[i].objectives(), pool[j].objectives()) {
                DominanceRelation::Dominates => {
                    strength[i] += 1;
                    dominators[j].push(i as u32);
                }
                DominanceRelation::DominatedBy => {
                    strength[j] += 1;
                    dominators[i].push(j as u32);
                }
                _ => {}
            }
        }
    }
    let mut dist = Vec::with_capacity(s - 1);
    (0..s)
        .map(|i| {
            let raw = dominators[i].iter().map(|&d| strength[d as usize] as u64).sum();
            dist.clear();
            let fi = pool[i].objectives();
            dist.extend(
                (0..s)
                    .filter(|&j| j != i)
                    .map(|j| fi.squared_distance(pool[j].objectives())),
            );
            let (_, &mut sigma_squared, _) = dist.select_nth_unstable(k - 1);
            let density = density_from_squared(sigma_squared);
            Ok(FitnessRecord {
                strength: strength[i],
                raw,
                sigma_squared,
                density,
                fitness: raw as f64 + density,
            })
        })
        .collect()
}
