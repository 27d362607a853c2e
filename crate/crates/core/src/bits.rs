//! Fixed-length bit vectors.
//!
//! Bit index 0 is the leftmost bit when a word is printed, and the first bit
//! put on the wire. Internally bits are stored little-endian inside `u64`
//! limbs; unused high bits of the last limb are always zero.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const LIMB_BITS: usize = u64::BITS as usize;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitWord {
    len: usize,
    limbs: Vec<u64>,
}

impl BitWord {
    /// All-zero word of `len` bits.
    pub fn zeros(len: usize) -> Self {
        BitWord {
            len,
            limbs: vec![0; len.div_ceil(LIMB_BITS)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut w = Self::zeros(len);
        for limb in w.limbs.iter_mut() {
            *limb = u64::MAX;
        }
        w.clear_tail();
        w
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut limbs = Vec::new();
        let mut len = 0;
        for bit in bits {
            if len % LIMB_BITS == 0 {
                limbs.push(0);
            }
            if bit {
                limbs[len / LIMB_BITS] |= 1 << (len % LIMB_BITS);
            }
            len += 1;
        }
        BitWord { len, limbs }
    }

    /// Builds a word from the low `len` bits of `value`, most significant
    /// bit first (so `from_u64(0b0110, 4)` prints as `0110`).
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= LIMB_BITS, "from_u64 supports at most 64 bits");
        Self::from_bits((0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1))
    }

    /// Inverse of [`BitWord::from_u64`].
    pub fn to_u64(&self) -> Option<u64> {
        if self.len > LIMB_BITS {
            return None;
        }
        Some(self.iter().fold(0u64, |acc, b| (acc << 1) | b as u64))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range");
        (self.limbs[index / LIMB_BITS] >> (index % LIMB_BITS)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit index {index} out of range");
        let mask = 1u64 << (index % LIMB_BITS);
        if value {
            self.limbs[index / LIMB_BITS] |= mask;
        } else {
            self.limbs[index / LIMB_BITS] &= !mask;
        }
    }

    pub fn flip(&mut self, index: usize) {
        assert!(index < self.len, "bit index {index} out of range");
        self.limbs[index / LIMB_BITS] ^= 1 << (index % LIMB_BITS);
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    /// XOR-reduction of all bits.
    pub fn parity(&self) -> bool {
        self.limbs.iter().fold(0u64, |acc, l| acc ^ l).count_ones() & 1 == 1
    }

    pub fn complement(&self) -> Self {
        let mut w = BitWord {
            len: self.len,
            limbs: self.limbs.iter().map(|l| !l).collect(),
        };
        w.clear_tail();
        w
    }

    pub fn xor(&self, other: &BitWord) -> Result<BitWord> {
        self.check_len(other)?;
        Ok(BitWord {
            len: self.len,
            limbs: self
                .limbs
                .iter()
                .zip(&other.limbs)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// Hamming distance, i.e. the number of ones in `self XOR other`.
    pub fn distance(&self, other: &BitWord) -> Result<usize> {
        self.check_len(other)?;
        Ok(self.distance_unchecked(other))
    }

    pub(crate) fn distance_unchecked(&self, other: &BitWord) -> usize {
        self.limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Packs the bits most-significant-bit first into bytes; the final byte
    /// is zero padded.
    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for (i, bit) in self.iter().enumerate() {
            if bit {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    /// Reads `len` bits from `bytes`, most-significant-bit first.
    pub fn from_packed(bytes: &[u8], len: usize) -> Result<BitWord> {
        if bytes.len() * 8 < len {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: bytes.len() * 8,
            });
        }
        Ok(Self::from_bits(
            (0..len).map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0),
        ))
    }

    fn check_len(&self, other: &BitWord) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        Ok(())
    }

    fn clear_tail(&mut self) {
        let rem = self.len % LIMB_BITS;
        if rem != 0 {
            if let Some(last) = self.limbs.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

impl FromStr for BitWord {
    type Err = Error;

    /// Parses an ASCII string of `0` and `1` characters.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidBitString(format!(
                    "unexpected character {other:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitWord::from_bits)
    }
}
