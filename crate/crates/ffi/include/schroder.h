#ifndef SCHRODER_H
#define SCHRODER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SchStatus {
  SCH_STATUS_OK = 0,
  SCH_STATUS_NULL_POINTER = 1,
  SCH_STATUS_INVALID_UTF8 = 2,
  SCH_STATUS_SYNTAX = 3,
  SCH_STATUS_INVALID_TREE = 4,
  SCH_STATUS_KIND_VIOLATION = 5,
  SCH_STATUS_INVALID_ARGUMENT = 6,
  SCH_STATUS_UNDEFINED = 7,
  SCH_STATUS_RETRY_BUDGET = 8,
  SCH_STATUS_SOLVER = 9,
  SCH_STATUS_INTERNAL = 10,
} SchStatus;

typedef enum SchKind {
  SCH_KIND_WORD_BINARY = 0,
  SCH_KIND_WORD_GENERAL = 1,
  SCH_KIND_SET_BINARY = 2,
  SCH_KIND_SET_GENERAL = 3,
} SchKind;

typedef enum SchFamily {
  SCH_FAMILY_P1 = 1,
  SCH_FAMILY_P2 = 2,
  SCH_FAMILY_P3 = 3,
  SCH_FAMILY_P4 = 4,
} SchFamily;

/**
 * Opaque tree handle.
 */
typedef struct SchTree SchTree;

/**
 * Characteristic constants rounded to `double`.
 */
typedef struct SchConstants {
  double r;
  double s;
  double gamma;
  double sigma2;
  double lambda;
  double height_const;
  double scaling_const;
} SchConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Valid until the
 * next failing call on the same thread; do not free.
 */
const char *sch_last_error(void);

/**
 * # Safety
 * `input` must be a NUL-terminated string; `out` must be writable.
 */
enum SchStatus sch_tree_parse(enum SchKind k, const char *input, struct SchTree **out);

/**
 * # Safety
 * `tree` must come from this library; `out` must be writable. Free the
 * result with [`sch_string_free`].
 */
enum SchStatus sch_tree_serialize(enum SchKind k, const struct SchTree *tree, char **out);

/**
 * # Safety
 * As [`sch_tree_parse`].
 */
enum SchStatus sch_tree_from_json(const char *input, struct SchTree **out);

/**
 * # Safety
 * As [`sch_tree_serialize`].
 */
enum SchStatus sch_tree_to_json(const struct SchTree *tree, char **out);

/**
 * Leaf count, vertex count and height of `tree`.
 *
 * # Safety
 * `tree` must come from this library; each output pointer must be writable.
 */
enum SchStatus sch_tree_stats(const struct SchTree *tree,
                              size_t *leaves,
                              size_t *vertices,
                              size_t *height);

/**
 * Number of trees of `f` with `n` leaves, as a decimal string.
 *
 * # Safety
 * `out` must be writable; free the result with [`sch_string_free`].
 */
enum SchStatus sch_family_count(enum SchFamily f, size_t n, char **out);

/**
 * A uniform tree of `f` with `n` leaves by the recursive method, using
 * random stream `(seed, stream_id)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SchStatus sch_sample(enum SchFamily f,
                          size_t n,
                          uint64_t seed,
                          uint64_t stream_id,
                          struct SchTree **out);

/**
 * As [`sch_sample`] but by conditioned Galton–Watson rejection.
 *
 * # Safety
 * `out` must be writable.
 */
enum SchStatus sch_sample_gw(enum SchFamily f,
                             size_t n,
                             uint64_t seed,
                             uint64_t stream_id,
                             uint64_t max_attempts,
                             struct SchTree **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SchStatus sch_constants(enum SchFamily f, struct SchConstants *out);

/**
 * # Safety
 * `tree` must be NULL or a handle from this library not yet freed.
 */
void sch_tree_free(struct SchTree *tree);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library not yet freed.
 */
void sch_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHRODER_H */
