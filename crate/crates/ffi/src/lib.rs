//! C ABI for `orthofec`.
//!
//! Codebooks are opaque handles created with [`ofec_codebook_new`] and
//! released with [`ofec_codebook_free`]. Every fallible call returns an
//! [`OfecStatus`]; on failure a human-readable message is available from
//! [`ofec_last_error_message`] until the next call on the same thread.
//! Words cross the boundary packed MSB-first, `ceil(n / 8)` bytes each, the
//! same layout as the framed file format. Buffers allocated by the library
//! are returned as [`OfecBuffer`] and must be released with
//! [`ofec_buffer_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use orthofec::codec::{self, DecodeOutcome, Policy, ReceivedWord};
use orthofec::{frame, BitWord, Codebook, DataWord, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidCodeLength = 2,
    DataOutOfRange = 3,
    LengthMismatch = 4,
    NotACodeword = 5,
    BufferTooSmall = 6,
    FrameError = 7,
    InvalidArgument = 8,
    Internal = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfecOutcomeKind {
    ExactMatch = 0,
    Corrected = 1,
    Retransmit = 2,
    NearestBeyondRadius = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfecPolicy {
    Conservative = 0,
    AcceptNearest = 1,
}

impl From<OfecPolicy> for Policy {
    fn from(p: OfecPolicy) -> Self {
        match p {
            OfecPolicy::Conservative => Policy::Conservative,
            OfecPolicy::AcceptNearest => Policy::AcceptNearest,
        }
    }
}

/// Decode result. `data` and `distance` are meaningful for every kind
/// except `RETRANSMIT`, which instead reports `distance` as the shared
/// minimum and `tied_candidates >= 2`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OfecDecodeResult {
    pub kind: OfecOutcomeKind,
    pub data: u64,
    pub distance: u32,
    pub tied_candidates: u32,
}

impl From<DecodeOutcome> for OfecDecodeResult {
    fn from(o: DecodeOutcome) -> Self {
        let (kind, data, tied) = match o {
            DecodeOutcome::ExactMatch { data } => (OfecOutcomeKind::ExactMatch, data.value(), 0),
            DecodeOutcome::Corrected { data, .. } => (OfecOutcomeKind::Corrected, data.value(), 0),
            DecodeOutcome::Retransmit {
                tied_candidates, ..
            } => (OfecOutcomeKind::Retransmit, 0, tied_candidates as u32),
            DecodeOutcome::NearestBeyondRadius { data, .. } => {
                (OfecOutcomeKind::NearestBeyondRadius, data.value(), 0)
            }
        };
        OfecDecodeResult {
            kind,
            data,
            distance: o.min_distance() as u32,
            tied_candidates: tied,
        }
    }
}

/// Library-owned byte buffer.
#[repr(C)]
#[derive(Debug)]
pub struct OfecBuffer {
    pub ptr: *mut u8,
    pub len: usize,
}

impl OfecBuffer {
    fn empty() -> Self {
        OfecBuffer {
            ptr: ptr::null_mut(),
            len: 0,
        }
    }

    fn from_vec(v: Vec<u8>) -> Self {
        let boxed = v.into_boxed_slice();
        let len = boxed.len();
        OfecBuffer {
            ptr: Box::into_raw(boxed) as *mut u8,
            len,
        }
    }
}

/// Outcome counts of a framed decode.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OfecFrameStats {
    pub symbols: u64,
    pub exact: u64,
    pub corrected: u64,
    pub retransmit: u64,
    pub beyond_radius: u64,
    /// Symbols for which REQ was raised under the policy.
    pub erasures: u64,
    /// 1 when the payload buffer was filled, 0 when decoding was aborted.
    pub payload_valid: u8,
}

/// Opaque codebook handle.
pub struct OfecCodebook {
    inner: Codebook,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg =
        CString::new(msg).unwrap_or_else(|_| CString::new("error message contained NUL").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> OfecStatus {
    match err {
        Error::InvalidCodeLength(_) => OfecStatus::InvalidCodeLength,
        Error::DataOutOfRange { .. } => OfecStatus::DataOutOfRange,
        Error::LengthMismatch { .. } => OfecStatus::LengthMismatch,
        Error::NotACodeword(_) => OfecStatus::NotACodeword,
        Error::Frame(_) => OfecStatus::FrameError,
        _ => OfecStatus::InvalidArgument,
    }
}

fn fail(status: OfecStatus, msg: impl Into<String>) -> OfecStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), OfecStatus>) -> OfecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OfecStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(OfecStatus::Internal, "panic inside orthofec"),
    }
}

fn lib_err(e: Error) -> OfecStatus {
    fail(status_of(&e), e.to_string())
}

unsafe fn borrow_codebook<'a>(cb: *const OfecCodebook) -> Result<&'a Codebook, OfecStatus> {
    cb.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| fail(OfecStatus::NullPointer, "null codebook handle"))
}

unsafe fn input_bytes<'a>(ptr: *const u8, len: usize) -> Result<&'a [u8], OfecStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(fail(OfecStatus::NullPointer, "null input buffer"));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn received_word(
    cb: &Codebook,
    ptr: *const u8,
    len: usize,
) -> Result<ReceivedWord, OfecStatus> {
    let want = cb.n().div_ceil(8);
    if len != want {
        return Err(fail(
            OfecStatus::LengthMismatch,
            format!(
                "expected {want} bytes for an n = {} word, got {len}",
                cb.n()
            ),
        ));
    }
    let bytes = input_bytes(ptr, len)?;
    BitWord::from_packed(bytes, cb.n())
        .map(ReceivedWord::new)
        .map_err(lib_err)
}

/// Message describing the most recent failure on this thread, or NULL.
/// The pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn ofec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds the codebook for code length `n` and stores the handle in `*out`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ofec_codebook_new(n: usize, out: *mut *mut OfecCodebook) -> OfecStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(OfecStatus::NullPointer, "null output pointer"));
        }
        let inner = Codebook::build(n).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(OfecCodebook { inner }));
        Ok(())
    })
}

/// # Safety
/// `cb` must be NULL or a handle from [`ofec_codebook_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ofec_codebook_free(cb: *mut OfecCodebook) {
    if !cb.is_null() {
        drop(Box::from_raw(cb));
    }
}

/// Code length, or 0 for a NULL handle.
///
/// # Safety
/// `cb` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ofec_codebook_n(cb: *const OfecCodebook) -> usize {
    cb.as_ref().map_or(0, |h| h.inner.n())
}

/// Data width in bits, or 0 for a NULL handle.
///
/// # Safety
/// `cb` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ofec_codebook_k(cb: *const OfecCodebook) -> usize {
    cb.as_ref().map_or(0, |h| h.inner.params().k())
}

/// Correction radius, or 0 for a NULL handle.
///
/// # Safety
/// `cb` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ofec_codebook_t(cb: *const OfecCodebook) -> usize {
    cb.as_ref().map_or(0, |h| h.inner.params().t())
}

/// Number of codewords (`2n`), or 0 for a NULL handle.
///
/// # Safety
/// `cb` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ofec_codebook_len(cb: *const OfecCodebook) -> usize {
    cb.as_ref().map_or(0, |h| h.inner.len())
}

/// Bytes needed to hold one packed codeword.
///
/// # Safety
/// `cb` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ofec_codeword_bytes(cb: *const OfecCodebook) -> usize {
    cb.as_ref().map_or(0, |h| h.inner.n().div_ceil(8))
}

/// Writes the packed codeword for `data` into `out[0..out_len]`.
///
/// # Safety
/// `cb` must be a live handle and `out` valid for `out_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ofec_encode(
    cb: *const OfecCodebook,
    data: u64,
    out: *mut u8,
    out_len: usize,
) -> OfecStatus {
    guard(|| {
        let cb = borrow_codebook(cb)?;
        let packed = codec::encode(cb, DataWord::new(data))
            .map_err(lib_err)?
            .bits()
            .to_packed();
        write_packed(&packed, out, out_len)
    })
}

unsafe fn write_packed(packed: &[u8], out: *mut u8, out_len: usize) -> Result<(), OfecStatus> {
    if out.is_null() {
        return Err(fail(OfecStatus::NullPointer, "null output buffer"));
    }
    if out_len < packed.len() {
        return Err(fail(
            OfecStatus::BufferTooSmall,
            format!("need {} bytes, got {out_len}", packed.len()),
        ));
    }
    ptr::copy_nonoverlapping(packed.as_ptr(), out, packed.len());
    Ok(())
}

/// Correlation-decodes one packed received word.
///
/// # Safety
/// `cb` must be a live handle, `word` valid for `word_len` bytes and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ofec_decode(
    cb: *const OfecCodebook,
    word: *const u8,
    word_len: usize,
    out: *mut OfecDecodeResult,
) -> OfecStatus {
    guard(|| {
        let cb = borrow_codebook(cb)?;
        if out.is_null() {
            return Err(fail(OfecStatus::NullPointer, "null result pointer"));
        }
        let r = received_word(cb, word, word_len)?;
        let outcome = codec::decode(cb, &r).map_err(lib_err)?;
        *out = outcome.into();
        Ok(())
    })
}

/// Writes the distance to every codebook entry into `out[0..2n]`.
///
/// # Safety
/// `cb` must be a live handle, `word` valid for `word_len` bytes and `out`
/// valid for `out_len` elements.
#[no_mangle]
pub unsafe extern "C" fn ofec_distances(
    cb: *const OfecCodebook,
    word: *const u8,
    word_len: usize,
    out: *mut u32,
    out_len: usize,
) -> OfecStatus {
    guard(|| {
        let cb = borrow_codebook(cb)?;
        let r = received_word(cb, word, word_len)?;
        if out.is_null() {
            return Err(fail(OfecStatus::NullPointer, "null output buffer"));
        }
        if out_len < cb.len() {
            return Err(fail(
                OfecStatus::BufferTooSmall,
                format!("need {} entries, got {out_len}", cb.len()),
            ));
        }
        let dists = codec::distances(cb, &r).map_err(lib_err)?;
        let out = slice::from_raw_parts_mut(out, cb.len());
        for (slot, d) in out.iter_mut().zip(dists) {
            *slot = d as u32;
        }
        Ok(())
    })
}

/// Parity of the first `nbits` bits of a packed word: 1 for odd weight.
///
/// # Safety
/// `word` must be valid for `ceil(nbits / 8)` bytes and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ofec_parity(word: *const u8, nbits: usize, out: *mut u8) -> OfecStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(OfecStatus::NullPointer, "null output pointer"));
        }
        let bytes = input_bytes(word, nbits.div_ceil(8))?;
        let w = BitWord::from_packed(bytes, nbits).map_err(lib_err)?;
        *out = w.parity() as u8;
        Ok(())
    })
}

/// Encodes `payload` into a framed stream.
///
/// # Safety
/// `payload` must be valid for `len` bytes and `out` writable. The returned
/// buffer must be released with [`ofec_buffer_free`].
#[no_mangle]
pub unsafe extern "C" fn ofec_frame_encode(
    n: usize,
    payload: *const u8,
    len: usize,
    out: *mut OfecBuffer,
) -> OfecStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(OfecStatus::NullPointer, "null output buffer"));
        }
        *out = OfecBuffer::empty();
        let cb = Codebook::build(n).map_err(lib_err)?;
        let bytes = input_bytes(payload, len)?;
        *out = OfecBuffer::from_vec(frame::encode(&cb, bytes).map_err(lib_err)?);
        Ok(())
    })
}

/// Decodes a framed stream. `payload_out` is filled only when
/// `stats->payload_valid` is 1.
///
/// # Safety
/// `bytes` must be valid for `len` bytes; `payload_out` and `stats` must be
/// writable. Release the payload with [`ofec_buffer_free`].
#[no_mangle]
pub unsafe extern "C" fn ofec_frame_decode(
    bytes: *const u8,
    len: usize,
    policy: OfecPolicy,
    payload_out: *mut OfecBuffer,
    stats: *mut OfecFrameStats,
) -> OfecStatus {
    guard(|| {
        if payload_out.is_null() || stats.is_null() {
            return Err(fail(OfecStatus::NullPointer, "null output pointer"));
        }
        *payload_out = OfecBuffer::empty();
        *stats = OfecFrameStats::default();
        let input = input_bytes(bytes, len)?;
        let decoded = frame::decode(input, policy.into()).map_err(lib_err)?;
        let mut s = OfecFrameStats {
            symbols: decoded.outcomes.len() as u64,
            erasures: decoded.erasures.len() as u64,
            ..Default::default()
        };
        for o in &decoded.outcomes {
            match o {
                DecodeOutcome::ExactMatch { .. } => s.exact += 1,
                DecodeOutcome::Corrected { .. } => s.corrected += 1,
                DecodeOutcome::Retransmit { .. } => s.retransmit += 1,
                DecodeOutcome::NearestBeyondRadius { .. } => s.beyond_radius += 1,
            }
        }
        if let Some(payload) = decoded.payload {
            s.payload_valid = 1;
            *payload_out = OfecBuffer::from_vec(payload);
        }
        *stats = s;
        Ok(())
    })
}

/// Releases a buffer returned by this library. NULL buffers are ignored.
///
/// # Safety
/// `buf` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ofec_buffer_free(buf: OfecBuffer) {
    if !buf.ptr.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(
            buf.ptr, buf.len,
        )));
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ofec_status_str(status: OfecStatus) -> *const c_char {
    let s: &'static std::ffi::CStr = match status {
        OfecStatus::Ok => c"ok",
        OfecStatus::NullPointer => c"null pointer",
        OfecStatus::InvalidCodeLength => c"invalid code length",
        OfecStatus::DataOutOfRange => c"data value out of range",
        OfecStatus::LengthMismatch => c"length mismatch",
        OfecStatus::NotACodeword => c"not a codeword",
        OfecStatus::BufferTooSmall => c"buffer too small",
        OfecStatus::FrameError => c"malformed frame",
        OfecStatus::InvalidArgument => c"invalid argument",
        OfecStatus::Internal => c"internal error",
    };
    s.as_ptr()
}
