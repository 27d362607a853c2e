#ifndef ORTHOFEC_H
#define ORTHOFEC_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OfecOutcomeKind {
  OFEC_OUTCOME_KIND_EXACT_MATCH = 0,
  OFEC_OUTCOME_KIND_CORRECTED = 1,
  OFEC_OUTCOME_KIND_RETRANSMIT = 2,
  OFEC_OUTCOME_KIND_NEAREST_BEYOND_RADIUS = 3,
} OfecOutcomeKind;

typedef enum OfecPolicy {
  OFEC_POLICY_CONSERVATIVE = 0,
  OFEC_POLICY_ACCEPT_NEAREST = 1,
} OfecPolicy;

typedef enum OfecStatus {
  OFEC_STATUS_OK = 0,
  OFEC_STATUS_NULL_POINTER = 1,
  OFEC_STATUS_INVALID_CODE_LENGTH = 2,
  OFEC_STATUS_DATA_OUT_OF_RANGE = 3,
  OFEC_STATUS_LENGTH_MISMATCH = 4,
  OFEC_STATUS_NOT_A_CODEWORD = 5,
  OFEC_STATUS_BUFFER_TOO_SMALL = 6,
  OFEC_STATUS_FRAME_ERROR = 7,
  OFEC_STATUS_INVALID_ARGUMENT = 8,
  OFEC_STATUS_INTERNAL = 99,
} OfecStatus;

/**
 * Opaque codebook handle.
 */
typedef struct OfecCodebook OfecCodebook;

/**
 * Decode result. `data` and `distance` are meaningful for every kind
 * except `RETRANSMIT`, which instead reports `distance` as the shared
 * minimum and `tied_candidates >= 2`.
 */
typedef struct OfecDecodeResult {
  enum OfecOutcomeKind kind;
  uint64_t data;
  uint32_t distance;
  uint32_t tied_candidates;
} OfecDecodeResult;

/**
 * Library-owned byte buffer.
 */
typedef struct OfecBuffer {
  uint8_t *ptr;
  size_t len;
} OfecBuffer;

/**
 * Outcome counts of a framed decode.
 */
typedef struct OfecFrameStats {
  uint64_t symbols;
  uint64_t exact;
  uint64_t corrected;
  uint64_t retransmit;
  uint64_t beyond_radius;
  /**
   * Symbols for which REQ was raised under the policy.
   */
  uint64_t erasures;
  /**
   * 1 when the payload buffer was filled, 0 when decoding was aborted.
   */
  uint8_t payload_valid;
} OfecFrameStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or NULL.
 * The pointer stays valid until the next failing call on the thread.
 */
const char *ofec_last_error_message(void);

/**
 * Builds the codebook for code length `n` and stores the handle in `*out`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum OfecStatus ofec_codebook_new(size_t n, struct OfecCodebook **out);

/**
 * # Safety
 * `cb` must be NULL or a handle from [`ofec_codebook_new`] not yet freed.
 */
void ofec_codebook_free(struct OfecCodebook *cb);

/**
 * Code length, or 0 for a NULL handle.
 *
 * # Safety
 * `cb` must be NULL or a live handle.
 */
size_t ofec_codebook_n(const struct OfecCodebook *cb);

/**
 * Data width in bits, or 0 for a NULL handle.
 *
 * # Safety
 * `cb` must be NULL or a live handle.
 */
size_t ofec_codebook_k(const struct OfecCodebook *cb);

/**
 * Correction radius, or 0 for a NULL handle.
 *
 * # Safety
 * `cb` must be NULL or a live handle.
 */
size_t ofec_codebook_t(const struct OfecCodebook *cb);

/**
 * Number of codewords (`2n`), or 0 for a NULL handle.
 *
 * # Safety
 * `cb` must be NULL or a live handle.
 */
size_t ofec_codebook_len(const struct OfecCodebook *cb);

/**
 * Bytes needed to hold one packed codeword.
 *
 * # Safety
 * `cb` must be NULL or a live handle.
 */
size_t ofec_codeword_bytes(const struct OfecCodebook *cb);

/**
 * Writes the packed codeword for `data` into `out[0..out_len]`.
 *
 * # Safety
 * `cb` must be a live handle and `out` valid for `out_len` bytes.
 */
enum OfecStatus ofec_encode(const struct OfecCodebook *cb,
                            uint64_t data,
                            uint8_t *out,
                            size_t out_len);

/**
 * Correlation-decodes one packed received word.
 *
 * # Safety
 * `cb` must be a live handle, `word` valid for `word_len` bytes and `out`
 * writable.
 */
enum OfecStatus ofec_decode(const struct OfecCodebook *cb,
                            const uint8_t *word,
                            size_t word_len,
                            struct OfecDecodeResult *out);

/**
 * Writes the distance to every codebook entry into `out[0..2n]`.
 *
 * # Safety
 * `cb` must be a live handle, `word` valid for `word_len` bytes and `out`
 * valid for `out_len` elements.
 */
enum OfecStatus ofec_distances(const struct OfecCodebook *cb,
                               const uint8_t *word,
                               size_t word_len,
                               uint32_t *out,
                               size_t out_len);

/**
 * Parity of the first `nbits` bits of a packed word: 1 for odd weight.
 *
 * # Safety
 * `word` must be valid for `ceil(nbits / 8)` bytes and `out` writable.
 */
enum OfecStatus ofec_parity(const uint8_t *word, size_t nbits, uint8_t *out);

/**
 * Encodes `payload` into a framed stream.
 *
 * # Safety
 * `payload` must be valid for `len` bytes and `out` writable. The returned
 * buffer must be released with [`ofec_buffer_free`].
 */
enum OfecStatus ofec_frame_encode(size_t n,
                                  const uint8_t *payload,
                                  size_t len,
                                  struct OfecBuffer *out);

/**
 * Decodes a framed stream. `payload_out` is filled only when
 * `stats->payload_valid` is 1.
 *
 * # Safety
 * `bytes` must be valid for `len` bytes; `payload_out` and `stats` must be
 * writable. Release the payload with [`ofec_buffer_free`].
 */
enum OfecStatus ofec_frame_decode(const uint8_t *bytes,
                                  size_t len,
                                  enum OfecPolicy policy,
                                  struct OfecBuffer *payload_out,
                                  struct OfecFrameStats *stats);

/**
 * Releases a buffer returned by this library. NULL buffers are ignored.
 *
 * # Safety
 * `buf` must come from this library and not have been freed already.
 */
void ofec_buffer_free(struct OfecBuffer buf);

/**
 * Static description of a status code.
 */
const char *ofec_status_str(enum OfecStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORTHOFEC_H */
