//! Encoding and minimum-distance correlation decoding.
//!
//! The receiver XORs the incoming word with every codebook entry and counts
//! the ones; the entry with the smallest count is the closest match. A tie at
//! the minimum raises a retransmission request.

use std::fmt;

use crate::bits::BitWord;
use crate::codebook::{Codebook, Codeword, DataWord};
use crate::error::{Error, Result};

/// An n-bit word as it arrives at the receiver, possibly impaired.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ReceivedWord(BitWord);

impl ReceivedWord {
    pub fn new(bits: BitWord) -> Self {
        ReceivedWord(bits)
    }

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

impl From<BitWord> for ReceivedWord {
    fn from(bits: BitWord) -> Self {
        ReceivedWord(bits)
    }
}

impl From<Codeword> for ReceivedWord {
    fn from(c: Codeword) -> Self {
        ReceivedWord(c.into_bits())
    }
}

impl From<&Codeword> for ReceivedWord {
    fn from(c: &Codeword) -> Self {
        ReceivedWord(c.bits().clone())
    }
}

impl std::str::FromStr for ReceivedWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(ReceivedWord)
    }
}

impl fmt::Display for ReceivedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for ReceivedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReceivedWord({})", self.0)
    }
}

/// Result of correlation decoding one received word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeOutcome {
    /// The word is a codeword (minimum count zero).
    ExactMatch { data: DataWord },
    /// Unique closest codeword within the correction radius.
    Corrected { data: DataWord, distance: usize },
    /// Two or more codewords share the minimum count; REQ is raised.
    Retransmit {
        min_distance: usize,
        tied_candidates: usize,
    },
    /// Unique closest codeword, but farther than the correction radius.
    NearestBeyondRadius { data: DataWord, distance: usize },
}

impl DecodeOutcome {
    /// Classifies the result of a minimum search: `min_distance` and the
    /// codebook indices attaining it, in ascending order.
    pub fn from_search(min_distance: usize, argmin: &[usize], t: usize) -> Self {
        assert!(!argmin.is_empty(), "minimum search produced no candidates");
        let data = DataWord::new(argmin[0] as u64);
        if min_distance == 0 {
            DecodeOutcome::ExactMatch { data }
        } else if argmin.len() >= 2 {
            DecodeOutcome::Retransmit {
                min_distance,
                tied_candidates: argmin.len(),
            }
        } else if min_distance <= t {
            DecodeOutcome::Corrected {
                data,
                distance: min_distance,
            }
        } else {
            DecodeOutcome::NearestBeyondRadius {
                data,
                distance: min_distance,
            }
        }
    }

    /// Decoded symbol, if the outcome identifies a unique one.
    pub fn data(&self) -> Option<DataWord> {
        match *self {
            DecodeOutcome::ExactMatch { data }
            | DecodeOutcome::Corrected { data, .. }
            | DecodeOutcome::NearestBeyondRadius { data, .. } => Some(data),
            DecodeOutcome::Retransmit { .. } => None,
        }
    }

    pub fn min_distance(&self) -> usize {
        match *self {
            DecodeOutcome::ExactMatch { .. } => 0,
            DecodeOutcome::Corrected { distance, .. }
            | DecodeOutcome::NearestBeyondRadius { distance, .. } => distance,
            DecodeOutcome::Retransmit { min_distance, .. } => min_distance,
        }
    }

    pub fn kind(&self) -> OutcomeKind {
        match self {
            DecodeOutcome::ExactMatch { .. } => OutcomeKind::ExactMatch,
            DecodeOutcome::Corrected { .. } => OutcomeKind::Corrected,
            DecodeOutcome::Retransmit { .. } => OutcomeKind::Retransmit,
            DecodeOutcome::NearestBeyondRadius { .. } => OutcomeKind::NearestBeyondRadius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    ExactMatch,
    Corrected,
    Retransmit,
    NearestBeyondRadius,
}

/// What to do with a unique nearest codeword beyond the correction radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    /// Treat it like a tie: raise REQ.
    #[default]
    Conservative,
    /// Accept the nearest codeword.
    AcceptNearest,
}

impl Policy {
    /// Whether the receiver raises REQ for this outcome.
    pub fn requests_retransmit(self, outcome: &DecodeOutcome) -> bool {
        match outcome {
            DecodeOutcome::Retransmit { .. } => true,
            DecodeOutcome::NearestBeyondRadius { .. } => self == Policy::Conservative,
            _ => false,
        }
    }

    /// The symbol the receiver delivers, if any.
    pub fn accepted_data(self, outcome: &DecodeOutcome) -> Option<DataWord> {
        if self.requests_retransmit(outcome) {
            None
        } else {
            outcome.data()
        }
    }
}

impl std::str::FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conservative" => Ok(Policy::Conservative),
            "accept-nearest" => Ok(Policy::AcceptNearest),
            other => Err(Error::Config(format!("unknown policy {other:?}"))),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Conservative => "conservative",
            Policy::AcceptNearest => "accept-nearest",
        })
    }
}

/// Maps a data symbol to its codeword. No parity bit is appended.
pub fn encode(cb: &Codebook, data: DataWord) -> Result<Codeword> {
    cb.data_to_code(data).cloned()
}

/// Ones-count of `r XOR entry` for every codebook entry, in codebook order.
pub fn distances(cb: &Codebook, r: &ReceivedWord) -> Result<Vec<usize>> {
    check_len(cb, r)?;
    Ok(cb
        .entries()
        .iter()
        .map(|c| c.bits().distance_unchecked(r.bits()))
        .collect())
}

/// Full minimum search: the minimum count and every index attaining it.
pub fn nearest(cb: &Codebook, r: &ReceivedWord) -> Result<(usize, Vec<usize>)> {
    let dists = distances(cb, r)?;
    let min = *dists.iter().min().expect("codebook is never empty");
    let argmin = dists
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d == min)
        .map(|(i, _)| i)
        .collect();
    Ok((min, argmin))
}

pub fn decode(cb: &Codebook, r: &ReceivedWord) -> Result<DecodeOutcome> {
    let (min, argmin) = nearest(cb, r)?;
    Ok(DecodeOutcome::from_search(min, &argmin, cb.params().t()))
}

/// Parity-only baseline detector: flags the word iff its parity is odd.
pub fn parity_detects(r: &ReceivedWord) -> bool {
    r.bits().parity()
}

fn check_len(cb: &Codebook, r: &ReceivedWord) -> Result<()> {
    if r.len() != cb.n() {
        return Err(Error::LengthMismatch {
            expected: cb.n(),
            actual: r.len(),
        });
    }
    Ok(())
}
