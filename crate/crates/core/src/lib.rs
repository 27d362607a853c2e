//! Biorthogonal forward error control.
//!
//! A k-bit symbol is mapped onto one of the `2n` rows of a biorthogonal
//! (Walsh-Hadamard plus complements) code of length `n = 2^(k-1)`. The
//! receiver decodes by minimum Hamming distance against the whole codebook:
//! an exact hit, a unique correction within `n/4 - 1` bits, or a
//! retransmission request when the closest match is ambiguous.

pub mod analysis;
pub mod bits;
pub mod channel;
pub mod codebook;
pub mod codec;
pub mod config;
pub mod error;
pub mod frame;
pub mod linksim;

pub use bits::BitWord;
pub use channel::{ChannelConfig, ErrorPattern, SplitMix64};
pub use codebook::{CodeParams, Codebook, Codeword, DataWord};
pub use codec::{DecodeOutcome, Policy, ReceivedWord};
pub use error::{Error, Result};
