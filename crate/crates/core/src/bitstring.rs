//! Packed binary decision vectors, the seeded generator, and the two
//! mutation operators (bit-wise and one-bit).

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// A fixed-length bit vector stored as little-endian packed `u64` words.
///
/// Bit `i` lives in word `i / 64` at position `i % 64`. Bits past `len` in the
/// last word are kept at zero so that word-level popcounts stay exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bitstring {
    words: Vec<u64>,
    len: usize,
}

impl Bitstring {
    pub fn zeros(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::instance("bitstring length must be at least 1"));
        }
        Ok(Bitstring {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        })
    }

    pub fn ones(len: usize) -> Result<Self> {
        let mut x = Self::zeros(len)?;
        for w in x.words.iter_mut() {
            *w = u64::MAX;
        }
        x.clear_tail();
        Ok(x)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut x = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                x.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        Ok(x)
    }

    /// Builds a bitstring from a byte slice holding one 0/1 value per position.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bits = bytes
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::invalid(format!("bit value {other} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// |x|₁
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    /// Bitwise complement x̄.
    pub fn complement(&self) -> Self {
        let mut x = Bitstring {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        x.clear_tail();
        x
    }

    pub fn hamming_distance(&self, other: &Bitstring) -> usize {
        assert_eq!(self.len, other.len, "hamming distance needs equal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Number of one bits in positions `start..end`.
    pub fn count_ones_range(&self, start: usize, end: usize) -> usize {
        self.check_range(start, end);
        let mut total = 0;
        let mut i = start;
        while i < end {
            let (w, off) = (i / WORD_BITS, i % WORD_BITS);
            let take = (WORD_BITS - off).min(end - i);
            let chunk = (self.words[w] >> off) & low_mask(take);
            total += chunk.count_ones() as usize;
            i += take;
        }
        total
    }

    /// Length of the run of ones starting at `start`, not extending past `end`.
    pub fn leading_ones_range(&self, start: usize, end: usize) -> usize {
        self.check_range(start, end);
        let mut total = 0;
        let mut i = start;
        while i < end {
            let (w, off) = (i / WORD_BITS, i % WORD_BITS);
            let take = (WORD_BITS - off).min(end - i);
            let chunk = self.words[w] >> off;
            let run = ((!chunk).trailing_zeros() as usize).min(take);
            total += run;
            if run < take {
                break;
            }
            i += take;
        }
        total
    }

    /// Length of the run of zeros ending at `end - 1`, not extending below `start`.
    pub fn trailing_zeros_range(&self, start: usize, end: usize) -> usize {
        self.check_range(start, end);
        let mut total = 0;
        let mut j = end;
        while j > start {
            let last = j - 1;
            let (w, off) = (last / WORD_BITS, last % WORD_BITS);
            let take = (off + 1).min(j - start);
            // move bit `off` to the top so leading_zeros counts downward from it
            let chunk = self.words[w] << (WORD_BITS - 1 - off);
            let run = (chunk.leading_zeros() as usize).min(take);
            total += run;
            if run < take {
                break;
            }
            j -= take;
        }
        total
    }

    fn check_range(&self, start: usize, end: usize) {
        assert!(
            start <= end && end <= self.len,
            "range {start}..{end} out of bounds for length {}",
            self.len
        );
    }

    fn clear_tail(&mut self) {
        let used = self.len % WORD_BITS;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= low_mask(used);
            }
        }
    }
}

#[inline]
fn low_mask(bits: usize) -> u64 {
    if bits >= WORD_BITS {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("'{other}' is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

/// Seeded pseudo-random source backed by ChaCha8.
///
/// Streams for independent trials are derived with [`RandomSource::derive`], so a
/// trial's draws depend only on its coordinates, never on scheduling.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Seed for the stream at `path` under `master`, e.g. `[cell, trial]`.
    pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
        path.iter().fold(splitmix64(master), |acc, &p| {
            splitmix64(acc ^ splitmix64(p.wrapping_add(0x632B_E59B_D9B4_E019)))
        })
    }

    pub fn derive(master: u64, path: &[u64]) -> Self {
        Self::new(Self::derive_seed(master, path))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Uniform sample from {0,1}ⁿ.
pub fn random_bitstring(n: usize, rng: &mut RandomSource) -> Result<Bitstring> {
    let mut x = Bitstring::zeros(n)?;
    for w in x.words.iter_mut() {
        *w = rng.next_u64();
    }
    x.clear_tail();
    Ok(x)
}

/// Flips every bit independently with probability 1/n.
///
/// Sampled as K ~ Binomial(n, 1/n) followed by a uniform K-subset of positions,
/// which has exactly the distribution of n independent Bernoulli(1/n) flips.
pub fn bitwise_mutate(x: &Bitstring, rng: &mut RandomSource) -> Bitstring {
    let n = x.len();
    let mut y = x.clone();
    let flips = Binomial::new(n as u64, 1.0 / n as f64)
        .expect("1/n is a valid probability")
        .sample(rng) as usize;
    for pos in index::sample(rng, n, flips) {
        y.flip(pos);
    }
    y
}

/// Flips exactly one uniformly chosen bit.
pub fn onebit_mutate(x: &Bitstring, rng: &mut RandomSource) -> Bitstring {
    let mut y = x.clone();
    let pos = rng.random_range(0..x.len());
    y.flip(pos);
    y
}
