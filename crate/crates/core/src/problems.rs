//! The three block-structured benchmark families, their closed-form Pareto
//! fronts, and the archive sizes that guarantee SPEA2 keeps every
//! non-dominated objective vector.
//!
//! A solution of length `n` is cut into `m/2` contiguous blocks of
//! `n' = 2n/m` bits. Block `j` (1-based) occupies positions
//! `(j-1)n'+1 ..= jn'` and owns objectives `2j-1` and `2j`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::bitstring::Bitstring;
use crate::error::{Error, Result};

/// Fronts larger than this are never materialized.
pub const MAX_FRONT_POINTS: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[serde(rename = "omm")]
    OneMinMax,
    #[serde(rename = "lotz")]
    LeadingOnesTrailingZeroes,
    #[serde(rename = "ojzj")]
    OneJumpZeroJump,
}

impl Family {
    pub fn short_name(self) -> &'static str {
        match self {
            Family::OneMinMax => "omm",
            Family::LeadingOnesTrailingZeroes => "lotz",
            Family::OneJumpZeroJump => "ojzj",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "omm" | "oneminmax" => Ok(Family::OneMinMax),
            "lotz" | "leadingonestrailingzeroes" => Ok(Family::LeadingOnesTrailingZeroes),
            "ojzj" | "onejumpzerojump" => Ok(Family::OneJumpZeroJump),
            other => Err(Error::invalid(format!("unknown problem family '{other}'"))),
        }
    }
}

/// An m-tuple of objective values, all maximized.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(SmallVec<[u32; 4]>);

impl ObjectiveVector {
    pub fn new(values: impl IntoIterator<Item = u32>) -> Self {
        ObjectiveVector(values.into_iter().collect())
    }

    #[inline]
    pub fn values(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Squared Euclidean distance; exact for integer objectives.
    pub fn squared_distance(&self, other: &ObjectiveVector) -> u64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(&a, &b)| {
                let d = a.abs_diff(b) as u64;
                d * d
            })
            .sum()
    }
}

impl From<&[u32]> for ObjectiveVector {
    fn from(v: &[u32]) -> Self {
        ObjectiveVector(SmallVec::from_slice(v))
    }
}

impl<const N: usize> From<[u32; N]> for ObjectiveVector {
    fn from(v: [u32; N]) -> Self {
        ObjectiveVector(SmallVec::from_slice(&v))
    }
}

impl fmt::Debug for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A validated benchmark instance: family, objective count `m`, length `n`,
/// and jump gap `k` for OneJumpZeroJump.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    family: Family,
    m: usize,
    n: usize,
    k: Option<usize>,
}

impl ProblemSpec {
    pub fn new(family: Family, m: usize, n: usize, k: Option<usize>) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::instance(format!("m must be an even integer >= 2, got {m}")));
        }
        if n == 0 {
            return Err(Error::instance("n must be positive"));
        }
        let half = m / 2;
        if !n.is_multiple_of(half) {
            return Err(Error::instance(format!("n = {n} is not a multiple of m/2 = {half}")));
        }
        let block = n / half;
        let k = match family {
            Family::OneJumpZeroJump => {
                let k = k.ok_or_else(|| Error::instance("OneJumpZeroJump needs a jump gap k"))?;
                if k < 2 || 2 * k > block {
                    return Err(Error::instance(format!(
                        "jump gap k = {k} must satisfy 2 <= k <= n'/2 = {}",
                        block / 2
                    )));
                }
                Some(k)
            }
            _ => {
                if k.is_some() {
                    return Err(Error::instance(format!("{family} takes no jump gap k")));
                }
                None
            }
        };
        Ok(ProblemSpec { family, m, n, k })
    }

    pub fn one_min_max(m: usize, n: usize) -> Result<Self> {
        Self::new(Family::OneMinMax, m, n, None)
    }

    pub fn lotz(m: usize, n: usize) -> Result<Self> {
        Self::new(Family::LeadingOnesTrailingZeroes, m, n, None)
    }

    pub fn ojzj(m: usize, n: usize, k: usize) -> Result<Self> {
        Self::new(Family::OneJumpZeroJump, m, n, Some(k))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    /// Number of blocks, m/2.
    pub fn blocks(&self) -> usize {
        self.m / 2
    }

    /// Block length n' = 2n/m.
    pub fn block_len(&self) -> usize {
        2 * self.n / self.m
    }

    /// Zero-based half-open bit range of block `j` (zero-based).
    pub fn block_range(&self, j: usize) -> std::ops::Range<usize> {
        let b = self.block_len();
        j * b..(j + 1) * b
    }

    fn jump_gap(&self) -> usize {
        self.k.expect("OneJumpZeroJump specs always carry k")
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(m={}, n={}", self.family, self.m, self.n)?;
        if let Some(k) = self.k {
            write!(f, ", k={k}")?;
        }
        write!(f, ")")
    }
}

/// Jump_{n',k} of a block with `ones` one-bits.
pub fn jump_value(ones: usize, n_prime: usize, k: usize) -> Result<usize> {
    if ones > n_prime {
        return Err(Error::invalid(format!("ones = {ones} exceeds block length {n_prime}")));
    }
    if k < 2 || k + 1 > n_prime {
        return Err(Error::invalid(format!(
            "jump gap k = {k} outside [2, {}]",
            n_prime.saturating_sub(1)
        )));
    }
    Ok(jump_unchecked(ones, n_prime, k))
}

#[inline]
fn jump_unchecked(ones: usize, n_prime: usize, k: usize) -> usize {
    if ones <= n_prime - k || ones == n_prime {
        k + ones
    } else {
        n_prime - ones
    }
}

/// Objective vector of `x` under `spec`.
pub fn evaluate(spec: &ProblemSpec, x: &Bitstring) -> Result<ObjectiveVector> {
    if x.len() != spec.n {
        return Err(Error::LengthMismatch {
            expected: spec.n,
            actual: x.len(),
        });
    }
    let b = spec.block_len();
    let mut values = SmallVec::with_capacity(spec.m);
    for j in 0..spec.blocks() {
        let r = spec.block_range(j);
        let (odd, even) = match spec.family {
            Family::OneMinMax => {
                let ones = x.count_ones_range(r.start, r.end);
                (ones, b - ones)
            }
            Family::LeadingOnesTrailingZeroes => (
                x.leading_ones_range(r.start, r.end),
                x.trailing_zeros_range(r.start, r.end),
            ),
            Family::OneJumpZeroJump => {
                let k = spec.jump_gap();
                let ones = x.count_ones_range(r.start, r.end);
                (jump_unchecked(ones, b, k), jump_unchecked(b - ones, b, k))
            }
        };
        values.push(odd as u32);
        values.push(even as u32);
    }
    Ok(ObjectiveVector(values))
}

/// Attainable first-objective values of one block on the front, and the
/// constant C with f_{2j-1} + f_{2j} = C for front points.
fn block_front_values(spec: &ProblemSpec) -> (Vec<u32>, u32) {
    let b = spec.block_len() as u32;
    match spec.family {
        Family::OneMinMax | Family::LeadingOnesTrailingZeroes => ((0..=b).collect(), b),
        Family::OneJumpZeroJump => {
            let k = spec.jump_gap() as u32;
            let mut vals = vec![k];
            vals.extend(2 * k..=b);
            vals.push(b + k);
            (vals, b + 2 * k)
        }
    }
}

/// |F*|: (2n/m+1)^{m/2} for OneMinMax and LOTZ, (2n/m-2k+3)^{m/2} for OneJumpZeroJump.
pub fn pareto_front_size(spec: &ProblemSpec) -> Result<u64> {
    let base = match spec.family {
        Family::OneMinMax | Family::LeadingOnesTrailingZeroes => spec.block_len() as u64 + 1,
        Family::OneJumpZeroJump => (spec.block_len() + 3 - 2 * spec.jump_gap()) as u64,
    };
    checked_pow(base, spec.blocks())
}

/// Archive size above which SPEA2 provably keeps every non-dominated
/// objective vector: (2n/m+1)^{m/2} for OneMinMax, (2n/m+1)^{m-1} for LOTZ,
/// (2n/m-2k+3)^{m/2} for OneJumpZeroJump.
pub fn required_archive_size(spec: &ProblemSpec) -> Result<u64> {
    match spec.family {
        Family::LeadingOnesTrailingZeroes => checked_pow(spec.block_len() as u64 + 1, spec.m - 1),
        _ => pareto_front_size(spec),
    }
}

fn checked_pow(base: u64, exp: usize) -> Result<u64> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .ok_or_else(|| Error::Overflow(format!("{base}^{exp}")))
}

/// Lazy enumeration of the closed-form Pareto front, one point per element of
/// the per-block value product. Odometer order, last block fastest.
#[derive(Clone, Debug)]
pub struct FrontIter {
    values: Vec<u32>,
    sum: u32,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for FrontIter {
    type Item = ObjectiveVector;

    fn next(&mut self) -> Option<ObjectiveVector> {
        if self.done {
            return None;
        }
        let point = ObjectiveVector(
            self.digits
                .iter()
                .flat_map(|&d| {
                    let v = self.values[d];
                    [v, self.sum - v]
                })
                .collect(),
        );
        // advance the odometer
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.digits[pos] += 1;
            if self.digits[pos] < self.values.len() {
                break;
            }
            self.digits[pos] = 0;
        }
        Some(point)
    }
}

pub fn pareto_front_iter(spec: &ProblemSpec) -> Result<FrontIter> {
    let size = pareto_front_size(spec)?;
    if size > MAX_FRONT_POINTS {
        return Err(Error::invalid(format!(
            "front of {spec} has {size} points, above the materialization limit {MAX_FRONT_POINTS}"
        )));
    }
    let (values, sum) = block_front_values(spec);
    Ok(FrontIter {
        values,
        sum,
        digits: vec![0; spec.blocks()],
        done: false,
    })
}

/// The exact Pareto front as a hash set, for coverage checks.
pub fn pareto_front(spec: &ProblemSpec) -> Result<HashSet<ObjectiveVector>> {
    Ok(pareto_front_iter(spec)?.collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OjzjClass {
    NotParetoOptimal,
    Internal,
    Extreme,
}

/// Internal: every block's ones-count lies in [k, n'-k]. Extreme: Pareto
/// optimal with at least one block all-zeros or all-ones.
pub fn classify_ojzj_solution(spec: &ProblemSpec, x: &Bitstring) -> Result<OjzjClass> {
    if spec.family != Family::OneJumpZeroJump {
        return Err(Error::invalid(format!("{spec} is not a OneJumpZeroJump instance")));
    }
    if x.len() != spec.n {
        return Err(Error::LengthMismatch {
            expected: spec.n,
            actual: x.len(),
        });
    }
    let b = spec.block_len();
    let k = spec.jump_gap();
    let mut extreme = false;
    for j in 0..spec.blocks() {
        let r = spec.block_range(j);
        let ones = x.count_ones_range(r.start, r.end);
        if ones == 0 || ones == b {
            extreme = true;
        } else if ones < k || ones > b - k {
            return Ok(OjzjClass::NotParetoOptimal);
        }
    }
    Ok(if extreme {
        OjzjClass::Extreme
    } else {
        OjzjClass::Internal
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstring::{random_bitstring, RandomSource};

    fn bits(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    fn ov(v: &[u32]) -> ObjectiveVector {
        ObjectiveVector::from(v)
    }

    fn with_ones(n: usize, ones: usize) -> Bitstring {
        let v: Vec<bool> = (0..n).map(|i| i < ones).collect();
        Bitstring::from_bits(&v).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ProblemSpec::one_min_max(3, 6).is_err());
        assert!(ProblemSpec::one_min_max(0, 6).is_err());
        assert!(ProblemSpec::one_min_max(4, 5).is_err());
        assert!(ProblemSpec::one_min_max(2, 0).is_err());
        assert!(ProblemSpec::ojzj(2, 8, 1).is_err());
        assert!(ProblemSpec::ojzj(2, 8, 5).is_err());
        assert!(ProblemSpec::ojzj(2, 8, 4).is_ok());
        assert!(ProblemSpec::new(Family::OneJumpZeroJump, 2, 8, None).is_err());
        assert!(ProblemSpec::new(Family::OneMinMax, 2, 8, Some(2)).is_err());
        let s = ProblemSpec::lotz(4, 8).unwrap();
        assert_eq!((s.blocks(), s.block_len()), (2, 4));
        assert_eq!(s.block_range(1), 4..8);
    }

    #[test]
    fn evaluate_examples() {
        let omm = ProblemSpec::one_min_max(2, 4).unwrap();
        assert_eq!(evaluate(&omm, &bits("1010")).unwrap(), ov(&[2, 2]));

        let lotz = ProblemSpec::lotz(4, 8).unwrap();
        assert_eq!(evaluate(&lotz, &bits("11000010")).unwrap(), ov(&[2, 2, 0, 1]));

        let ojzj = ProblemSpec::ojzj(2, 8, 2).unwrap();
        assert_eq!(evaluate(&ojzj, &bits("11111111")).unwrap(), ov(&[10, 2]));
        assert_eq!(evaluate(&ojzj, &bits("11111110")).unwrap(), ov(&[1, 3]));

        assert!(matches!(
            evaluate(&omm, &bits("101")),
            Err(Error::LengthMismatch { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn jump_examples() {
        assert_eq!(jump_value(8, 8, 2).unwrap(), 10);
        assert_eq!(jump_value(4, 8, 2).unwrap(), 6);
        assert_eq!(jump_value(7, 8, 2).unwrap(), 1);
        assert!(jump_value(9, 8, 2).is_err());
        assert!(jump_value(3, 8, 1).is_err());
        assert!(jump_value(3, 8, 8).is_err());
    }

    #[test]
    fn front_examples() {
        let omm = ProblemSpec::one_min_max(2, 4).unwrap();
        let front: HashSet<_> = pareto_front(&omm).unwrap();
        let expected: HashSet<_> = [[0, 4], [1, 3], [2, 2], [3, 1], [4, 0]]
            .into_iter()
            .map(ObjectiveVector::from)
            .collect();
        assert_eq!(front, expected);

        let ojzj = ProblemSpec::ojzj(2, 8, 2).unwrap();
        let front = pareto_front(&ojzj).unwrap();
        assert_eq!(front.len(), 7);
        let mut firsts: Vec<u32> = front.iter().map(|p| p.values()[0]).collect();
        firsts.sort();
        assert_eq!(firsts, vec![2, 4, 5, 6, 7, 8, 10]);
        assert!(front.iter().all(|p| p.values()[1] == 12 - p.values()[0]));

        assert_eq!(pareto_front(&ProblemSpec::lotz(4, 8).unwrap()).unwrap().len(), 25);
    }

    #[test]
    fn front_sizes() {
        assert_eq!(pareto_front_size(&ProblemSpec::one_min_max(2, 8).unwrap()).unwrap(), 9);
        assert_eq!(pareto_front_size(&ProblemSpec::ojzj(2, 8, 2).unwrap()).unwrap(), 7);
        assert_eq!(pareto_front_size(&ProblemSpec::one_min_max(4, 8).unwrap()).unwrap(), 25);
        assert_eq!(required_archive_size(&ProblemSpec::lotz(2, 8).unwrap()).unwrap(), 9);
        assert_eq!(required_archive_size(&ProblemSpec::lotz(4, 8).unwrap()).unwrap(), 125);
        assert_eq!(required_archive_size(&ProblemSpec::ojzj(2, 8, 2).unwrap()).unwrap(), 7);
    }

    #[test]
    fn huge_fronts_are_refused() {
        let s = ProblemSpec::one_min_max(16, 256).unwrap();
        assert_eq!(pareto_front_size(&s).unwrap(), 33u64.pow(8));
        assert!(pareto_front_iter(&s).is_err());
        let s = ProblemSpec::one_min_max(40, 400).unwrap();
        assert!(matches!(pareto_front_size(&s), Err(Error::Overflow(_))));
    }

    #[test]
    fn iterator_count_matches_size_for_small_specs() {
        for m in [2, 4, 6] {
            for n in (m / 2..=12).step_by(m / 2) {
                let s = ProblemSpec::lotz(m, n).unwrap();
                assert_eq!(
                    pareto_front_iter(&s).unwrap().count() as u64,
                    pareto_front_size(&s).unwrap()
                );
            }
        }
    }

    #[test]
    fn classification_examples() {
        let s = ProblemSpec::ojzj(2, 8, 2).unwrap();
        assert_eq!(
            classify_ojzj_solution(&s, &with_ones(8, 4)).unwrap(),
            OjzjClass::Internal
        );
        assert_eq!(
            classify_ojzj_solution(&s, &with_ones(8, 8)).unwrap(),
            OjzjClass::Extreme
        );
        assert_eq!(
            classify_ojzj_solution(&s, &with_ones(8, 0)).unwrap(),
            OjzjClass::Extreme
        );
        assert_eq!(
            classify_ojzj_solution(&s, &with_ones(8, 7)).unwrap(),
            OjzjClass::NotParetoOptimal
        );
        let omm = ProblemSpec::one_min_max(2, 8).unwrap();
        assert!(classify_ojzj_solution(&omm, &with_ones(8, 4)).is_err());
    }

    fn all_specs_up_to(n_max: usize) -> Vec<ProblemSpec> {
        let mut out = Vec::new();
        for m in (2..=8).step_by(2) {
            for n in (m / 2..=n_max).step_by(m / 2) {
                out.push(ProblemSpec::one_min_max(m, n).unwrap());
                out.push(ProblemSpec::lotz(m, n).unwrap());
                for k in 2..=n {
                    if let Ok(s) = ProblemSpec::ojzj(m, n, k) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn pair_sum_properties() {
        let mut rng = RandomSource::new(31);
        for spec in all_specs_up_to(32) {
            let b = spec.block_len() as u32;
            let front = if pareto_front_size(&spec).unwrap() <= 100_000 {
                Some(pareto_front(&spec).unwrap())
            } else {
                None
            };
            let draws = if spec.family() == Family::OneMinMax {
                10_000
            } else {
                300
            };
            for _ in 0..draws {
                let x = random_bitstring(spec.n(), &mut rng).unwrap();
                let f = evaluate(&spec, &x).unwrap();
                assert_eq!(f.len(), spec.m());
                for j in 0..spec.blocks() {
                    let (a, c) = (f.values()[2 * j], f.values()[2 * j + 1]);
                    match spec.family() {
                        Family::OneMinMax => assert_eq!(a + c, b),
                        Family::LeadingOnesTrailingZeroes => {
                            let r = spec.block_range(j);
                            let ones = x.count_ones_range(r.start, r.end) as u32;
                            // 1^a 0^b shape iff leading ones account for every one-bit
                            let sorted = x.leading_ones_range(r.start, r.end) as u32 == ones;
                            assert!(a + c <= b);
                            assert_eq!(a + c == b, sorted);
                        }
                        Family::OneJumpZeroJump => {
                            let k = spec.k().unwrap() as u32;
                            assert!(a <= b + k && c <= b + k);
                            if classify_ojzj_solution(&spec, &x).unwrap() != OjzjClass::NotParetoOptimal {
                                assert_eq!(a + c, 2 * k + b);
                            }
                        }
                    }
                }
                if spec.family() == Family::OneMinMax {
                    if let Some(front) = &front {
                        assert!(front.contains(&f));
                    }
                }
            }
        }
    }
}
