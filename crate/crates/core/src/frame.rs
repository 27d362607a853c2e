//! Framed file format for encoded payloads.
//!
//! ```text
//! offset  size  field
//! 0       6     magic "OCFEC1"
//! 6       2     n, big-endian
//! 8       8     symbol count, big-endian
//! 16      1     pad bits appended to the payload to fill the last symbol
//! 17      ...   codewords, bits packed MSB-first, back to back;
//!               the final byte is zero padded
//! ```
//!
//! The payload is read as a bit stream, most significant bit of each byte
//! first, and cut into k-bit symbols.

use crate::bits::BitWord;
use crate::codebook::{Codebook, DataWord};
use crate::codec::{self, DecodeOutcome, Policy, ReceivedWord};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 6] = b"OCFEC1";
pub const HEADER_LEN: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameHeader {
    pub n: u16,
    pub symbols: u64,
    pub pad_bits: u8,
}

impl FrameHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..6].copy_from_slice(MAGIC);
        out[6..8].copy_from_slice(&self.n.to_be_bytes());
        out[8..16].copy_from_slice(&self.symbols.to_be_bytes());
        out[16] = self.pad_bits;
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Frame(format!(
                "truncated header: {} of {HEADER_LEN} bytes",
                bytes.len()
            )));
        }
        if &bytes[..6] != MAGIC {
            return Err(Error::Frame("bad magic".into()));
        }
        Ok(FrameHeader {
            n: u16::from_be_bytes([bytes[6], bytes[7]]),
            symbols: u64::from_be_bytes(bytes[8..16].try_into().expect("8 bytes")),
            pad_bits: bytes[16],
        })
    }

    /// Length of the codeword section in bytes.
    pub fn body_len(&self) -> Option<usize> {
        let bits = (self.symbols as u128).checked_mul(self.n as u128)?;
        usize::try_from(bits.div_ceil(8)).ok()
    }
}

/// Splits `payload` into k-bit symbols and frames their codewords.
pub fn encode(cb: &Codebook, payload: &[u8]) -> Result<Vec<u8>> {
    let n = cb.n();
    let k = cb.params().k();
    let payload_bits = payload.len() * 8;
    let symbols = payload_bits.div_ceil(k);
    let pad_bits = symbols * k - payload_bits;
    let header = FrameHeader {
        n: u16::try_from(n).map_err(|_| Error::InvalidCodeLength(n))?,
        symbols: symbols as u64,
        pad_bits: pad_bits as u8,
    };

    let bit_at = |i: usize| i < payload_bits && payload[i / 8] & (0x80 >> (i % 8)) != 0;
    let mut body = BitWriter::with_capacity(symbols * n);
    for s in 0..symbols {
        let value = (0..k).fold(0u64, |acc, j| (acc << 1) | bit_at(s * k + j) as u64);
        let cw = cb.data_to_code(DataWord::new(value))?;
        body.extend(cw.bits().iter());
    }

    let mut out = header.to_bytes().to_vec();
    out.extend(body.finish());
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameDecode {
    pub header: FrameHeader,
    pub outcomes: Vec<DecodeOutcome>,
    /// Symbols for which REQ was raised under the policy.
    pub erasures: Vec<u64>,
    /// Recovered payload; `None` when a conservative decode hit an erasure.
    pub payload: Option<Vec<u8>>,
}

impl FrameDecode {
    pub fn count(&self, pred: impl Fn(&DecodeOutcome) -> bool) -> usize {
        self.outcomes.iter().filter(|o| pred(o)).count()
    }
}

/// Decodes a framed stream. Under [`Policy::Conservative`] any erasure
/// aborts payload recovery; under [`Policy::AcceptNearest`] the nearest
/// codeword (lowest index on a tie) is substituted.
pub fn decode(bytes: &[u8], policy: Policy) -> Result<FrameDecode> {
    let header = FrameHeader::parse(bytes)?;
    let cb = Codebook::build(header.n as usize)
        .map_err(|e| Error::Frame(format!("corrupt header: {e}")))?;
    let n = cb.n();
    let k = cb.params().k();

    let body_len = header
        .body_len()
        .ok_or_else(|| Error::Frame("corrupt header: symbol count overflows".into()))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() < body_len {
        return Err(Error::Frame(format!(
            "truncated stream: expected {body_len} body bytes, found {}",
            body.len()
        )));
    }
    if body.len() > body_len {
        return Err(Error::Frame(format!(
            "{} unexpected trailing bytes",
            body.len() - body_len
        )));
    }
    let symbols = header.symbols as usize;
    let pad = header.pad_bits as usize;
    let valid_pad = if symbols == 0 { pad == 0 } else { pad < k };
    let payload_bits = (symbols * k).checked_sub(pad);
    let payload_bits = match payload_bits {
        Some(b) if valid_pad && b % 8 == 0 => b,
        _ => {
            return Err(Error::Frame(format!(
                "corrupt header: {pad} pad bits with {symbols} {k}-bit symbols"
            )))
        }
    };

    let mut outcomes = Vec::with_capacity(symbols);
    let mut erasures = Vec::new();
    let mut out = BitWriter::with_capacity(symbols * k);
    let mut aborted = false;
    for s in 0..symbols {
        let word =
            BitWord::from_bits((s * n..(s + 1) * n).map(|i| body[i / 8] & (0x80 >> (i % 8)) != 0));
        let r = ReceivedWord::new(word);
        let (min, argmin) = codec::nearest(&cb, &r)?;
        let outcome = DecodeOutcome::from_search(min, &argmin, cb.params().t());
        outcomes.push(outcome);
        let value = match policy.accepted_data(&outcome) {
            Some(d) => d.value(),
            None => {
                erasures.push(s as u64);
                if policy == Policy::Conservative {
                    aborted = true;
                    continue;
                }
                argmin[0] as u64
            }
        };
        out.extend((0..k).rev().map(|j| (value >> j) & 1 == 1));
    }

    let payload = (!aborted).then(|| {
        let mut bytes = out.finish();
        bytes.truncate(payload_bits / 8);
        bytes
    });
    Ok(FrameDecode {
        header,
        outcomes,
        erasures,
        payload,
    })
}

struct BitWriter {
    bytes: Vec<u8>,
    len: usize,
}

impl BitWriter {
    fn with_capacity(bits: usize) -> Self {
        BitWriter {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().expect("pushed above") |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    fn extend(&mut self, bits: impl IntoIterator<Item = bool>) {
        for b in bits {
            self.push(b);
        }
    }

    fn finish(self) -> Vec<u8> {
        self.bytes
    }
}
