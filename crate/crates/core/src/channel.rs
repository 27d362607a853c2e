//! Channel impairments: explicit error patterns, a seeded binary symmetric
//! channel, and exhaustive pattern enumeration.
//!
//! Randomness comes from [`SplitMix64`], a fixed 64-bit generator with
//! published constants, so seeded runs reproduce bit-for-bit on every
//! platform and in any language that reimplements the same few lines.

use std::fmt;

use crate::bits::BitWord;
use crate::codebook::Codeword;
use crate::codec::ReceivedWord;
use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator (Steele, Lea, Flood 2014).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(state: u64) -> Self {
        SplitMix64 { state }
    }

    /// Independent stream for item `index` of a run seeded with `seed`:
    /// initial state `seed XOR mix64(index)`.
    pub fn for_stream(seed: u64, index: u64) -> Self {
        SplitMix64::new(seed ^ mix64(index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, bound)` by rejection; `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    /// One Bernoulli trial: true with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

/// An n-bit error pattern; set bits are flipped by the channel.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ErrorPattern {
    bits: BitWord,
    weight: usize,
}

impl ErrorPattern {
    pub fn new(bits: BitWord) -> Self {
        let weight = bits.count_ones();
        ErrorPattern { bits, weight }
    }

    pub fn zero(n: usize) -> Self {
        ErrorPattern::new(BitWord::zeros(n))
    }

    /// Pattern with ones at the given positions.
    pub fn from_positions(n: usize, positions: &[usize]) -> Self {
        let mut bits = BitWord::zeros(n);
        for &p in positions {
            bits.set(p, true);
        }
        ErrorPattern::new(bits)
    }

    pub fn bits(&self) -> &BitWord {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl std::str::FromStr for ErrorPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(ErrorPattern::new)
    }
}

impl fmt::Display for ErrorPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.bits, f)
    }
}

impl fmt::Debug for ErrorPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ErrorPattern({}, w={})", self.bits, self.weight)
    }
}

/// Independent bit flips with a fixed probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IidChannel {
    flip_probability: f64,
    seed: u64,
}

impl IidChannel {
    pub fn new(flip_probability: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip_probability) {
            return Err(Error::InvalidProbability(flip_probability));
        }
        Ok(IidChannel {
            flip_probability,
            seed,
        })
    }

    pub fn flip_probability(&self) -> f64 {
        self.flip_probability
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelConfig {
    /// The same pattern is applied to every word.
    Explicit(ErrorPattern),
    IidFlip(IidChannel),
}

impl ChannelConfig {
    pub fn noiseless() -> Self {
        ChannelConfig::IidFlip(IidChannel {
            flip_probability: 0.0,
            seed: 0,
        })
    }

    pub fn iid(flip_probability: f64, seed: u64) -> Result<Self> {
        IidChannel::new(flip_probability, seed).map(ChannelConfig::IidFlip)
    }

    /// Per-bit impairment source for word number `index` of a run.
    pub fn bit_flipper(&self, index: u64) -> BitFlipper<'_> {
        match self {
            ChannelConfig::Explicit(pattern) => BitFlipper::Explicit { pattern, next: 0 },
            ChannelConfig::IidFlip(iid) => BitFlipper::Iid {
                p: iid.flip_probability,
                rng: SplitMix64::for_stream(iid.seed, index),
            },
        }
    }
}

/// Serial impairment source: yields one flip decision per transmitted bit,
/// in wire order.
#[derive(Debug, Clone)]
pub enum BitFlipper<'a> {
    Explicit {
        pattern: &'a ErrorPattern,
        next: usize,
    },
    Iid {
        p: f64,
        rng: SplitMix64,
    },
}

impl BitFlipper<'_> {
    pub fn next_flip(&mut self) -> Result<bool> {
        match self {
            BitFlipper::Explicit { pattern, next } => {
                if *next >= pattern.len() {
                    return Err(Error::LengthMismatch {
                        expected: *next + 1,
                        actual: pattern.len(),
                    });
                }
                let flip = pattern.bits().get(*next);
                *next += 1;
                Ok(flip)
            }
            BitFlipper::Iid { p, rng } => Ok(rng.bernoulli(*p)),
        }
    }
}

/// XORs the pattern into the codeword.
pub fn apply_pattern(c: &Codeword, e: &ErrorPattern) -> Result<ReceivedWord> {
    c.bits().xor(e.bits()).map(ReceivedWord::new)
}

/// Impairs word number `index` of a run and reports the realized pattern.
pub fn random_impair(
    c: &Codeword,
    cfg: &ChannelConfig,
    index: u64,
) -> Result<(ReceivedWord, ErrorPattern)> {
    if let ChannelConfig::Explicit(p) = cfg {
        if p.len() != c.len() {
            return Err(Error::LengthMismatch {
                expected: c.len(),
                actual: p.len(),
            });
        }
    }
    let mut flipper = cfg.bit_flipper(index);
    let flips = (0..c.len())
        .map(|_| flipper.next_flip())
        .collect::<Result<Vec<_>>>()?;
    let pattern = ErrorPattern::new(BitWord::from_bits(flips));
    let received = apply_pattern(c, &pattern)?;
    Ok((received, pattern))
}

/// Uniformly random pattern of exactly `weight` ones (partial Fisher-Yates).
pub fn random_pattern_of_weight(n: usize, weight: usize, rng: &mut SplitMix64) -> ErrorPattern {
    assert!(weight <= n);
    let mut positions: Vec<usize> = (0..n).collect();
    for i in 0..weight {
        let j = i + rng.below((n - i) as u64) as usize;
        positions.swap(i, j);
    }
    ErrorPattern::from_positions(n, &positions[..weight])
}

/// Every pattern of weight `0..=max_weight`, by weight and then
/// lexicographically by the set of flipped positions.
pub fn enumerate_patterns(n: usize, max_weight: usize) -> Result<PatternIter> {
    if max_weight > n {
        return Err(Error::WeightOutOfRange { max_weight, n });
    }
    Ok(PatternIter::new(n, 0, max_weight))
}

/// Patterns with weight in `min_weight..=max_weight`.
pub fn enumerate_patterns_between(
    n: usize,
    min_weight: usize,
    max_weight: usize,
) -> Result<PatternIter> {
    if max_weight > n {
        return Err(Error::WeightOutOfRange { max_weight, n });
    }
    Ok(PatternIter::new(n, min_weight, max_weight))
}

/// Number of patterns produced by [`enumerate_patterns`], or `None` on
/// overflow.
pub fn pattern_count(n: usize, max_weight: usize) -> Option<u128> {
    (0..=max_weight.min(n)).try_fold(0u128, |acc, w| acc.checked_add(binomial(n, w)?))
}

pub(crate) fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

#[derive(Debug, Clone)]
pub struct PatternIter {
    n: usize,
    max_weight: usize,
    weight: usize,
    positions: Option<Vec<usize>>,
}

impl PatternIter {
    fn new(n: usize, min_weight: usize, max_weight: usize) -> Self {
        let positions = (min_weight <= max_weight).then(|| (0..min_weight).collect());
        PatternIter {
            n,
            max_weight,
            weight: min_weight,
            positions,
        }
    }

    fn advance(&mut self) {
        let Some(pos) = self.positions.as_mut() else {
            return;
        };
        let (n, w) = (self.n, self.weight);
        // rightmost position that can still move right
        if let Some(i) = (0..w).rev().find(|&i| pos[i] < n - w + i) {
            pos[i] += 1;
            for j in i + 1..w {
                pos[j] = pos[j - 1] + 1;
            }
            return;
        }
        if w < self.max_weight {
            self.weight += 1;
            self.positions = Some((0..self.weight).collect());
        } else {
            self.positions = None;
        }
    }
}

impl Iterator for PatternIter {
    type Item = ErrorPattern;

    fn next(&mut self) -> Option<ErrorPattern> {
        let out = ErrorPattern::from_positions(self.n, self.positions.as_ref()?);
        self.advance();
        Some(out)
    }
}
