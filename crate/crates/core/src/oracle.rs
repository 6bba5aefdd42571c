//! Brute-force reference implementations for small instances.
//!
//! Nothing here calls into the evaluation, dominance or truncation code it
//! checks; only the `ProblemSpec`, `Bitstring` and `ObjectiveVector` types
//! are shared.

use std::collections::{BTreeSet, HashSet};

use rand::Rng;

use crate::baseline::{BaselineAlgorithm, BaselineConfig, Semo};
use crate::bitstring::{random_bitstring, Bitstring, RandomSource};
use crate::dominance::{nondominated_indices, HasObjectives};
use crate::error::{Error, Result};
use crate::problems::{self, Family, ObjectiveVector, ProblemSpec};
use crate::spea2::{self, DensityK, EngineConfig, Spea2};

pub const MAX_EXHAUSTIVE_N: usize = 20;
pub const MAX_BRUTE_POOL: usize = 10_000;
pub const MAX_TRUNCATION_MEMBERS: usize = 12;

/// Objective vector straight from the family definitions, on a plain bit slice.
fn reference_objectives(spec: &ProblemSpec, x: &[u8]) -> ObjectiveVector {
    let m = spec.m();
    let n = spec.n();
    let block = 2 * n / m;
    let mut out = Vec::with_capacity(m);
    for obj in 1..=m {
        // objective 2j-1 and 2j both read block j (1-based)
        let j = obj.div_ceil(2);
        let bits = &x[(j - 1) * block..j * block];
        let odd = obj % 2 == 1;
        let value = match spec.family() {
            Family::OneMinMax => bits.iter().filter(|&&b| (b == 1) == odd).count(),
            Family::LeadingOnesTrailingZeroes => {
                if odd {
                    // sum over i of prod_{l<=i} x_l
                    (1..=block).filter(|&i| bits[..i].iter().all(|&b| b == 1)).count()
                } else {
                    (1..=block).filter(|&i| bits[i - 1..].iter().all(|&b| b == 0)).count()
                }
            }
            Family::OneJumpZeroJump => {
                let k = spec.k().expect("validated spec");
                let ones = bits.iter().filter(|&&b| (b == 1) == odd).count();
                if ones <= block - k || ones == block {
                    k + ones
                } else {
                    block - ones
                }
            }
        };
        out.push(value as u32);
    }
    ObjectiveVector::new(out)
}

fn ref_dominates(u: &ObjectiveVector, v: &ObjectiveVector) -> bool {
    let (u, v) = (u.values(), v.values());
    u.iter().zip(v).all(|(a, b)| a >= b) && u.iter().zip(v).any(|(a, b)| a > b)
}

/// Objective vector of `x`, computed by the reference definitions.
pub fn reference_evaluate(spec: &ProblemSpec, x: &Bitstring) -> Result<ObjectiveVector> {
    if x.len() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            actual: x.len(),
        });
    }
    let bits: Vec<u8> = x.iter().map(u8::from).collect();
    Ok(reference_objectives(spec, &bits))
}

/// Non-dominated image of all 2ⁿ solutions.
pub fn exhaustive_pareto_front(spec: &ProblemSpec) -> Result<HashSet<ObjectiveVector>> {
    let n = spec.n();
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::invalid(format!(
            "exhaustive enumeration limited to n <= {MAX_EXHAUSTIVE_N}, got {n}"
        )));
    }
    let mut bits = vec![0u8; n];
    let mut image: BTreeSet<ObjectiveVector> = BTreeSet::new();
    for word in 0u64..(1 << n) {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = ((word >> i) & 1) as u8;
        }
        image.insert(reference_objectives(spec, &bits));
    }
    let image: Vec<ObjectiveVector> = image.into_iter().collect();
    Ok(image
        .iter()
        .filter(|v| !image.iter().any(|u| ref_dominates(u, v)))
        .cloned()
        .collect())
}

/// Indices of pool members no other member dominates, by direct definition.
pub fn brute_nondominated<T: HasObjectives>(pool: &[T]) -> Result<Vec<usize>> {
    if pool.len() > MAX_BRUTE_POOL {
        return Err(Error::invalid(format!(
            "brute-force pool limited to {MAX_BRUTE_POOL} members"
        )));
    }
    Ok((0..pool.len())
        .filter(|&i| !pool.iter().any(|y| ref_dominates(y.objectives(), pool[i].objectives())))
        .collect())
}

/// {x : x ≤_d y for every y}, from fully materialized sorted squared-distance vectors.
pub fn brute_truncation_minima<T: HasObjectives>(members: &[T]) -> Result<Vec<usize>> {
    let s = members.len();
    if !(2..=MAX_TRUNCATION_MEMBERS).contains(&s) {
        return Err(Error::invalid(format!(
            "truncation oracle needs 2..={MAX_TRUNCATION_MEMBERS} members, got {s}"
        )));
    }
    let sigma: Vec<Vec<u64>> = (0..s)
        .map(|i| {
            let mut d: Vec<u64> = (0..s)
                .filter(|&j| j != i)
                .map(|j| {
                    members[i]
                        .objectives()
                        .values()
                        .iter()
                        .zip(members[j].objectives().values())
                        .map(|(&a, &b)| (a as i64 - b as i64).pow(2) as u64)
                        .sum()
                })
                .collect();
            d.sort();
            d
        })
        .collect();
    let le_d = |x: usize, y: usize| {
        let all_equal = (0..s - 1).all(|k| sigma[x][k] == sigma[y][k]);
        let first_smaller = (0..s - 1).any(|k| (0..k).all(|l| sigma[x][l] == sigma[y][l]) && sigma[x][k] < sigma[y][k]);
        all_equal || first_smaller
    };
    Ok((0..s).filter(|&x| (0..s).all(|y| le_d(x, y))).collect())
}

/// Outcome of one named cross-check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, failures: Vec<String>, cases: usize) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed: failures.is_empty(),
            detail: if failures.is_empty() {
                format!("{cases} cases agree")
            } else {
                format!("{} of {cases} cases disagree; first: {}", failures.len(), failures[0])
            },
        }
    }
}

fn small_specs() -> Vec<ProblemSpec> {
    let mut specs = Vec::new();
    for m in [2, 4] {
        for n in [4, 8, 12, 16] {
            specs.push(ProblemSpec::one_min_max(m, n).expect("valid"));
            specs.push(ProblemSpec::lotz(m, n).expect("valid"));
        }
        for n in [8, 12, 16] {
            specs.push(ProblemSpec::ojzj(m, n, 2).expect("valid"));
        }
    }
    specs
}

fn random_vector(rng: &mut RandomSource, m: usize, max: u32) -> ObjectiveVector {
    ObjectiveVector::new((0..m).map(|_| rng.random_range(0..=max)))
}

/// Closed-form front vs exhaustive enumeration, plus the size formulas.
pub fn check_fronts() -> CheckOutcome {
    let specs = small_specs();
    let mut failures = Vec::new();
    for spec in &specs {
        let closed = problems::pareto_front(spec);
        let exhaustive = exhaustive_pareto_front(spec);
        let size = problems::pareto_front_size(spec);
        match (closed, exhaustive, size) {
            (Ok(c), Ok(e), Ok(s)) => {
                if c != e {
                    failures.push(format!(
                        "{spec}: closed form has {} points, enumeration {}",
                        c.len(),
                        e.len()
                    ));
                } else if c.len() as u64 != s {
                    failures.push(format!("{spec}: size formula {s} but front has {}", c.len()));
                }
            }
            _ => failures.push(format!("{spec}: front computation failed")),
        }
    }
    CheckOutcome::new("pareto-front", failures, specs.len())
}

/// Packed evaluation vs the reference definitions on random strings.
pub fn check_evaluation(seed: u64) -> CheckOutcome {
    let mut rng = RandomSource::new(seed);
    let mut failures = Vec::new();
    let specs = small_specs();
    let mut cases = 0;
    for spec in &specs {
        for _ in 0..500 {
            let x = random_bitstring(spec.n(), &mut rng).expect("n >= 1");
            let fast = problems::evaluate(spec, &x).expect("length matches");
            let slow = reference_evaluate(spec, &x).expect("length matches");
            cases += 1;
            if fast != slow {
                failures.push(format!("{spec} x={x}: {fast} vs {slow}"));
            }
        }
    }
    CheckOutcome::new("evaluation", failures, cases)
}

/// nondominated_indices vs brute_nondominated on random pools.
pub fn check_dominance(seed: u64, pools: usize) -> CheckOutcome {
    let mut rng = RandomSource::new(seed);
    let mut failures = Vec::new();
    for _ in 0..pools {
        let m = 2 * rng.random_range(1..=2);
        let size = rng.random_range(1..=20);
        let pool: Vec<ObjectiveVector> = (0..size).map(|_| random_vector(&mut rng, m, 4)).collect();
        let fast = nondominated_indices(&pool).expect("non-empty");
        let slow = brute_nondominated(&pool).expect("small pool");
        if fast != slow {
            failures.push(format!("{pool:?}: {fast:?} vs {slow:?}"));
        }
    }
    CheckOutcome::new("non-dominated-subset", failures, pools)
}

/// One truncation step vs brute_truncation_minima, on archives with forced
/// duplicates.
pub fn check_truncation(seed: u64, archives: usize) -> CheckOutcome {
    let mut rng = RandomSource::new(seed);
    let mut failures = Vec::new();
    for case in 0..archives {
        let members = random_truncation_archive(&mut rng, case);
        let removed = match spea2::truncation_order(&members, members.len() - 1, &mut rng) {
            Ok(r) => r[0],
            Err(e) => {
                failures.push(format!("{members:?}: {e}"));
                continue;
            }
        };
        let minima = brute_truncation_minima(&members).expect("size within guard");
        if !minima.contains(&removed) {
            failures.push(format!("{members:?}: removed {removed}, minima {minima:?}"));
        }
        let duplicated = |i: usize| members.iter().filter(|v| **v == members[i]).count() > 1;
        if (0..members.len()).any(duplicated) && !duplicated(removed) {
            failures.push(format!("{members:?}: removed unique vector {removed}"));
        }
    }
    CheckOutcome::new("truncation", failures, archives)
}

/// A random archive of 4..=12 objective vectors drawn from the fronts of small
/// OneMinMax / OneJumpZeroJump instances; every other case forces a duplicate.
pub fn random_truncation_archive(rng: &mut RandomSource, case: usize) -> Vec<ObjectiveVector> {
    let spec = match case % 4 {
        0 => ProblemSpec::one_min_max(2, 6),
        1 => ProblemSpec::ojzj(2, 8, 2),
        2 => ProblemSpec::one_min_max(4, 8),
        _ => ProblemSpec::ojzj(4, 12, 2),
    }
    .expect("valid spec");
    let size = rng.random_range(4..=12);
    let mut members: Vec<ObjectiveVector> = (0..size)
        .map(|_| {
            let x = random_bitstring(spec.n(), rng).expect("n >= 1");
            reference_evaluate(&spec, &x).expect("length matches")
        })
        .collect();
    if case.is_multiple_of(2) {
        let src = rng.random_range(0..size);
        let mut dst = rng.random_range(0..size);
        if dst == src {
            dst = (dst + 1) % size;
        }
        members[dst] = members[src].clone();
    }
    members
}

/// Preservation of every non-dominated objective vector across selection, on
/// short SPEA2 runs with archives at the required size.
pub fn check_preservation(seed: u64, generations: u64) -> CheckOutcome {
    let cases: Vec<(ProblemSpec, usize, DensityK)> = [
        ProblemSpec::one_min_max(2, 8).expect("valid"),
        ProblemSpec::lotz(2, 8).expect("valid"),
        ProblemSpec::ojzj(2, 8, 2).expect("valid"),
    ]
    .into_iter()
    .map(|spec| {
        (
            spec,
            problems::required_archive_size(&spec).expect("small") as usize,
            DensityK::Auto,
        )
    })
    .collect();
    check_preservation_cases(&cases, &[seed], generations)
}

/// Like [`check_preservation`] for explicit (spec, μ̄ = μ, density k) cases,
/// each run once per seed for `generations` generations.
pub fn check_preservation_cases(
    cases: &[(ProblemSpec, usize, DensityK)],
    seeds: &[u64],
    generations: u64,
) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for &(spec, cap, density_k) in cases {
        let front = problems::pareto_front(&spec).expect("small");
        for &seed in seeds {
            let cfg = EngineConfig::new(spec, cap, cap)
                .with_density_k(density_k)
                .with_seed(seed);
            let mut engine = match Spea2::new(cfg, &front) {
                Ok(e) => e,
                Err(e) => {
                    failures.push(format!("{spec}: {e}"));
                    continue;
                }
            };
            for g in 0..generations {
                let mut violation = None;
                let res = engine.select_observed(|pool, keep| {
                    checked += 1;
                    let nd = brute_nondominated(pool).expect("small pool");
                    let kept: HashSet<&ObjectiveVector> = keep.iter().map(|&i| pool[i].objectives()).collect();
                    if let Some(&lost) = nd.iter().find(|&&i| !kept.contains(pool[i].objectives())) {
                        violation = Some(format!(
                            "{spec} k={density_k} seed {seed} generation {g}: lost {}",
                            pool[lost].objectives()
                        ));
                    }
                });
                if let Err(e) = res.and_then(|_| engine.breed()) {
                    failures.push(format!("{spec}: {e}"));
                    break;
                }
                failures.extend(violation);
            }
        }
    }
    CheckOutcome::new("preservation", failures, checked)
}

/// SEMO/GSEMO population invariant on a few short runs.
pub fn check_baseline_population(seed: u64) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for spec in [
        ProblemSpec::lotz(2, 8).expect("valid"),
        ProblemSpec::ojzj(2, 8, 2).expect("valid"),
    ] {
        let front = problems::pareto_front(&spec).expect("small");
        for alg in [BaselineAlgorithm::Semo, BaselineAlgorithm::Gsemo] {
            let cfg = BaselineConfig::new(spec, alg).with_seed(seed).with_budget(5_000);
            let Ok(engine) = Semo::new(cfg, &front) else {
                failures.push(format!("{spec} {alg}: setup failed"));
                continue;
            };
            let res = engine.run_observed(|pop| {
                cases += 1;
                let nd = brute_nondominated(pop).expect("small");
                let distinct: HashSet<_> = pop.iter().map(|p| p.objectives()).collect();
                if nd.len() != pop.len() || distinct.len() != pop.len() {
                    failures.push(format!("{spec} {alg}: population is not a distinct non-dominated set"));
                }
            });
            if let Err(e) = res {
                failures.push(format!("{spec} {alg}: {e}"));
            }
        }
    }
    CheckOutcome::new("baseline-population", failures, cases)
}

/// Every oracle cross-check at its default size.
pub fn cross_check_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        check_fronts(),
        check_evaluation(seed),
        check_dominance(seed, 1000),
        check_truncation(seed, 500),
        check_preservation(seed, 100),
        check_baseline_population(seed),
    ]
}
