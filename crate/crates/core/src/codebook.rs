//! The biorthogonal code set.
//!
//! For a code length `n` (a power of two, at least 8) the codebook holds the
//! `n` rows of the Sylvester-Hadamard matrix in natural order, written over
//! the 0/1 alphabet, followed by their `n` complements. Data symbol `d < n`
//! selects orthogonal row `d`; `d >= n` selects the complement of row
//! `d - n`. Every codeword has even weight, so the implied parity bit is
//! always zero and never transmitted.

use std::collections::HashMap;
use std::fmt;

use crate::bits::BitWord;
use crate::error::{Error, Result};

/// Largest supported code length. The codebook stores `2n` words of `n`
/// bits, so this keeps it to a few megabytes.
pub const MAX_CODE_LENGTH: usize = 4096;

/// Derived parameters of an `n`-bit biorthogonal code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeParams {
    n: usize,
}

impl CodeParams {
    pub fn new(n: usize) -> Result<Self> {
        if !(8..=MAX_CODE_LENGTH).contains(&n) || !n.is_power_of_two() {
            return Err(Error::InvalidCodeLength(n));
        }
        Ok(CodeParams { n })
    }

    /// Code length in bits.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Data width in bits: `log2(n) + 1`.
    pub fn k(&self) -> usize {
        self.n.trailing_zeros() as usize + 1
    }

    /// Decision threshold `n/4`, midway between two orthogonal codewords.
    pub fn threshold(&self) -> usize {
        self.n / 4
    }

    /// Guaranteed correction radius `n/4 - 1`.
    pub fn t(&self) -> usize {
        self.threshold() - 1
    }

    /// Number of codewords, `2n = 2^k`.
    pub fn symbols(&self) -> usize {
        2 * self.n
    }
}

/// A k-bit data symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataWord(u64);

impl DataWord {
    pub fn new(value: u64) -> Self {
        DataWord(value)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Renders the symbol as `k` binary digits.
    pub fn to_bit_string(self, k: usize) -> String {
        format!("{:0width$b}", self.0, width = k)
    }
}

impl From<u64> for DataWord {
    fn from(value: u64) -> Self {
        DataWord(value)
    }
}

/// A member of a codebook.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Codeword(BitWord);

impl Codeword {
    pub fn bits(&self) -> &BitWord {
        &self.0
    }

    pub fn into_bits(self) -> BitWord {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Codeword({})", self.0)
    }
}

/// XOR-reduction of all bits of a word.
pub fn parity(word: &BitWord) -> bool {
    word.parity()
}

#[derive(Debug, Clone)]
pub struct Codebook {
    params: CodeParams,
    entries: Vec<Codeword>,
    index: HashMap<BitWord, usize>,
}

impl Codebook {
    /// Builds the `2n`-entry biorthogonal codebook for code length `n`.
    pub fn build(n: usize) -> Result<Self> {
        let params = CodeParams::new(n)?;
        let orthogonal: Vec<BitWord> = (0..n)
            .map(|row| BitWord::from_bits((0..n).map(|col| (row & col).count_ones() & 1 == 1)))
            .collect();
        let antipodal: Vec<BitWord> = orthogonal.iter().map(BitWord::complement).collect();
        let entries: Vec<Codeword> = orthogonal
            .into_iter()
            .chain(antipodal)
            .map(Codeword)
            .collect();
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, c)| (c.0.clone(), i))
            .collect();
        Ok(Codebook {
            params,
            entries,
            index,
        })
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn entries(&self) -> &[Codeword] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn data_to_code(&self, data: DataWord) -> Result<&Codeword> {
        usize::try_from(data.0)
            .ok()
            .and_then(|i| self.entries.get(i))
            .ok_or(Error::DataOutOfRange {
                value: data.0,
                symbols: self.entries.len(),
            })
    }

    /// Exact lookup. Impaired words go through [`crate::codec::decode`].
    pub fn code_to_data(&self, word: &BitWord) -> Result<DataWord> {
        if word.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                actual: word.len(),
            });
        }
        self.index
            .get(word)
            .map(|&i| DataWord(i as u64))
            .ok_or_else(|| Error::NotACodeword(word.to_string()))
    }

    pub fn is_codeword(&self, word: &BitWord) -> bool {
        self.index.contains_key(word)
    }

    /// Plain-text dump: one codeword per line, orthogonal block first.
    pub fn dump(&self) -> String {
        let mut out = String::with_capacity(self.len() * (self.n() + 1));
        for entry in &self.entries {
            out.push_str(&entry.to_string());
            out.push('\n');
        }
        out
    }
}
