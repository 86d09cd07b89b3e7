#ifndef SYMHOM_H
#define SYMHOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define SYMHOM_RING_Q 0

#define SYMHOM_RING_Z 1

#define SYMHOM_SYSTEM_SYM 0

#define SYMHOM_SYSTEM_ORDERED 1

#define SYMHOM_REDUCE_NONE 0

#define SYMHOM_REDUCE_DEG 1

#define SYMHOM_REDUCE_SYM 2

#define SYMHOM_REDUCE_DEG_SYM 3

#define SYMHOM_REDUCE_CON 4

#define SYMHOM_REDUCE_POSCON 5

#define SYMHOM_REDUCE_T 6

#define SYMHOM_REDUCE_R 7

#define SYMHOM_REDUCE_RT 8

/**
 * Result of every fallible call.
 */
typedef enum SymhomStatus {
  SYMHOM_STATUS_OK = 0,
  /**
   * a required pointer was null or a string was not UTF-8
   */
  SYMHOM_STATUS_NULL_OR_ENCODING = 1,
  SYMHOM_STATUS_INVALID_INPUT = 2,
  SYMHOM_STATUS_RESOURCE_LIMIT = 3,
  SYMHOM_STATUS_CONTRACT_VIOLATION = 4,
  SYMHOM_STATUS_UNSUPPORTED = 5,
  /**
   * the call panicked; the handle arguments should be considered unusable
   */
  SYMHOM_STATUS_INTERNAL = 6,
  /**
   * an output buffer was too small; the required length was still written
   */
  SYMHOM_STATUS_BUFFER_TOO_SMALL = 7,
} SymhomStatus;

/**
 * A chain complex with fixed bases.
 */
typedef struct SymhomComplex SymhomComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the chain complex of a simplicial complex given as
 * `{"vertices": [...], "facets": [[...], ...]}`, up to degree `max_degree`.
 *
 * `system` selects all tuples on faces ([`SYMHOM_SYSTEM_SYM`]) or the weakly
 * increasing ones in vertex-list order ([`SYMHOM_SYSTEM_ORDERED`]).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer slot.
 */
enum SymhomStatus symhom_complex_from_facets(const char *json,
                                             int32_t system,
                                             int32_t max_degree,
                                             int32_t ring,
                                             int32_t reduce,
                                             struct SymhomComplex **out);

/**
 * Builds the cubical chain complex of graph maps out of cubes into the graph
 * `{"vertices": [...], "edges": [[u, v], ...]}`, up to degree `max_degree`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer slot.
 */
enum SymhomStatus symhom_complex_from_graph(const char *json,
                                            int32_t max_degree,
                                            int32_t ring,
                                            int32_t reduce,
                                            struct SymhomComplex **out);

/**
 * Restores a complex from the JSON written by [`symhom_complex_to_json`].
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer slot.
 */
enum SymhomStatus symhom_complex_from_json(const char *json, struct SymhomComplex **out);

/**
 * Releases a complex. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle from this library that has not been freed.
 */
void symhom_complex_free(struct SymhomComplex *h);

/**
 * Lowest and highest built degree.
 *
 * # Safety
 * `h` must be a live handle; `lo` and `hi` valid `int32_t` slots.
 */
enum SymhomStatus symhom_complex_degrees(const struct SymhomComplex *h, int32_t *lo, int32_t *hi);

/**
 * Rank of the chain group in degree `n` (0 outside the built range).
 *
 * # Safety
 * `h` must be a live handle; `dim` a valid slot.
 */
enum SymhomStatus symhom_complex_dim(const struct SymhomComplex *h, int32_t n, uintptr_t *dim);

/**
 * Homology in degree `n`: the free rank and the torsion coefficients.
 *
 * `torsion` may be null when `capacity` is 0. The number of coefficients is
 * always written to `torsion_len`; if it exceeds `capacity` the call returns
 * [`SymhomStatus::BufferTooSmall`] and nothing is written to `torsion`.
 * Coefficients beyond `u64` are reported as `UINT64_MAX`.
 *
 * # Safety
 * `h` must be a live handle, `betti` and `torsion_len` valid slots, and
 * `torsion` valid for `capacity` writes.
 */
enum SymhomStatus symhom_complex_homology(const struct SymhomComplex *h,
                                          int32_t n,
                                          uintptr_t *betti,
                                          uint64_t *torsion,
                                          uintptr_t capacity,
                                          uintptr_t *torsion_len);

/**
 * Serializes a complex (bases and differentials) as JSON. Free the result
 * with [`symhom_string_free`].
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer slot.
 */
enum SymhomStatus symhom_complex_to_json(const struct SymhomComplex *h, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library that has not been freed.
 */
void symhom_string_free(char *s);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call into the library from the same thread.
 */
const char *symhom_last_error(void);

/**
 * Library version as a static string.
 */
const char *symhom_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMHOM_H */
