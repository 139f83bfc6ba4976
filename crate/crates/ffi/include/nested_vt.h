#ifndef NESTED_VT_H
#define NESTED_VT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum NvtStatus {
  NVT_STATUS_OK = 0,
  NVT_STATUS_INVALID_ARGUMENT = 1,
  NVT_STATUS_LENGTH_MISMATCH = 2,
  NVT_STATUS_UNRECOVERABLE_ERASURES = 3,
  NVT_STATUS_INCONSISTENT_PARITY = 4,
  NVT_STATUS_ORACLE_CEILING = 5,
  NVT_STATUS_PARSE = 6,
  NVT_STATUS_IO = 7,
  NVT_STATUS_NULL_POINTER = 8,
  NVT_STATUS_BUFFER_TOO_SMALL = 9,
  NVT_STATUS_PANIC = 10,
} NvtStatus;

typedef enum NvtScheme {
  NVT_SCHEME_ALL_ZERO = 0,
  /**
   * Uses the `r0` argument as the common residue.
   */
  NVT_SCHEME_FIXED_NON_ZERO = 1,
  NVT_SCHEME_DISTINCT = 2,
} NvtScheme;

typedef enum NvtOutcome {
  NVT_OUTCOME_UNIQUE = 0,
  NVT_OUTCOME_AMBIGUOUS = 1,
  NVT_OUTCOME_TIMEOUT = 2,
  NVT_OUTCOME_NO_SOLUTION = 3,
} NvtOutcome;

/**
 * Opaque nested code parameters.
 */
typedef struct NvtCodec NvtCodec;

/**
 * Opaque, labelled fragment collection.
 */
typedef struct NvtFragmentSet NvtFragmentSet;

typedef struct NvtRateBounds {
  double lower;
  double rate;
  double upper;
  bool guaranteed;
} NvtRateBounds;

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *nvt_last_error_message(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum NvtStatus nvt_codec_new(size_t d_sec,
                             size_t m,
                             size_t ell,
                             enum NvtScheme scheme,
                             uint64_t r0,
                             struct NvtCodec **out);

/**
 * # Safety
 * `codec` must come from `nvt_codec_new` and not be used afterwards. NULL is ignored.
 */
void nvt_codec_free(struct NvtCodec *codec);

/**
 * Data bits per codeword, or 0 for a NULL handle.
 *
 * # Safety
 * `codec` must be NULL or a live handle.
 */
size_t nvt_codec_data_len(const struct NvtCodec *codec);

/**
 * Codeword length, or 0 for a NULL handle.
 *
 * # Safety
 * `codec` must be NULL or a live handle.
 */
size_t nvt_codec_codeword_len(const struct NvtCodec *codec);

/**
 * # Safety
 * `codec` must be NULL or a live handle.
 */
struct NvtRateBounds nvt_codec_rate_bounds(const struct NvtCodec *codec);

/**
 * Encodes `data_len` data bits into `out`, which must hold the codeword length.
 *
 * # Safety
 * Buffers must be valid for the given lengths.
 */
enum NvtStatus nvt_encode(const struct NvtCodec *codec,
                          const uint8_t *data,
                          size_t data_len,
                          uint8_t *out,
                          size_t out_len);

/**
 * Extracts the data bits of a full codeword into `out`.
 *
 * # Safety
 * Buffers must be valid for the given lengths.
 */
enum NvtStatus nvt_strip(const struct NvtCodec *codec,
                         const uint8_t *codeword,
                         size_t len,
                         uint8_t *out,
                         size_t out_len);

/**
 * Sets `*valid` to whether every VT condition of the code holds.
 *
 * # Safety
 * Buffers must be valid for the given lengths.
 */
enum NvtStatus nvt_verify(const struct NvtCodec *codec,
                          const uint8_t *codeword,
                          size_t len,
                          bool *valid);

/**
 * # Safety
 * `out` must be valid for one write.
 */
enum NvtStatus nvt_parity_length(size_t n_d, size_t *out);

/**
 * # Safety
 * `bits` must be valid for `len` bytes and `out` for one write.
 */
enum NvtStatus nvt_syndrome(const uint8_t *bits, size_t len, uint64_t *out);

/**
 * Empty fragment set to fill with `nvt_fragments_push`.
 */
struct NvtFragmentSet *nvt_fragments_new(void);

/**
 * Appends a fragment; labels follow insertion order starting at 1.
 *
 * # Safety
 * `set` must be a live handle and `bits` valid for `len` bytes.
 */
enum NvtStatus nvt_fragments_push(struct NvtFragmentSet *set, const uint8_t *bits, size_t len);

/**
 * Runs the channel on a codeword and returns the shuffled fragments.
 *
 * # Safety
 * `codeword` must be valid for `len` bytes and `out` for one write.
 */
enum NvtStatus nvt_chop_shuffle(const uint8_t *codeword,
                                size_t len,
                                double p_break,
                                uint64_t seed,
                                struct NvtFragmentSet **out);

/**
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t nvt_fragments_count(const struct NvtFragmentSet *set);

/**
 * Length of fragment `index` (0-based), or 0 if out of range.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t nvt_fragments_len(const struct NvtFragmentSet *set, size_t index);

/**
 * Copies fragment `index` (0-based) into `out`.
 *
 * # Safety
 * `set` must be a live handle and `out` valid for `out_len` bytes.
 */
enum NvtStatus nvt_fragments_copy(const struct NvtFragmentSet *set,
                                  size_t index,
                                  uint8_t *out,
                                  size_t out_len);

/**
 * # Safety
 * `set` must come from this library and not be used afterwards. NULL is ignored.
 */
void nvt_fragments_free(struct NvtFragmentSet *set);

/**
 * Reassembles `set`. On `Unique` or `Ambiguous`, `out_data` receives the
 * data word (0, 1, or 2 for an erased position); `out_len` must be at least
 * the data length. `collect_all` selects between stopping at the first
 * full-length word and collecting all of them.
 *
 * # Safety
 * Handles must be live; `out_data` valid for `out_len` bytes; `outcome`
 * and `iterations` valid for one write each (`iterations` may be NULL).
 */
enum NvtStatus nvt_decode(const struct NvtCodec *codec,
                          const struct NvtFragmentSet *set,
                          size_t tau,
                          uint64_t delta,
                          bool collect_all,
                          uint8_t *out_data,
                          size_t out_len,
                          enum NvtOutcome *outcome,
                          uint64_t *iterations);

#endif  /* NESTED_VT_H */
