#ifndef CONTENTION_H
#define CONTENTION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum CrStatus {
  CR_STATUS_OK = 0,
  CR_STATUS_NULL_POINTER = 1,
  CR_STATUS_INVALID_ARGUMENT = 2,
  CR_STATUS_INVALID_DISTRIBUTION = 3,
  CR_STATUS_ABSOLUTE_CONTINUITY = 4,
  CR_STATUS_PARSE = 5,
  CR_STATUS_IO = 6,
  CR_STATUS_INFEASIBLE = 7,
  CR_STATUS_PRECONDITION = 8,
  CR_STATUS_PANIC = 9,
} CrStatus;

/**
 * Which deterministic advice scheme to run.
 */
typedef enum CrDetScheme {
  CR_DET_SCHEME_NO_CD = 0,
  CR_DET_SCHEME_CD = 1,
} CrDetScheme;

/**
 * A network-size distribution.
 */
typedef struct CrDistribution CrDistribution;

/**
 * Per-trial results of an experiment.
 */
typedef struct CrResultTable CrResultTable;

typedef struct CrTrialRow {
  uint64_t trial;
  uint64_t k;
  bool solved;
  uint64_t rounds;
} CrTrialRow;

/**
 * A proportion with its Wilson 95% interval.
 */
typedef struct CrProportion {
  double rate;
  double lower;
  double upper;
} CrProportion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread. Valid until the
 * next failing call on the same thread; never null.
 */
const char *cr_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *cr_version(void);

/**
 * Builds a generator distribution (`point:K`, `uniform`, `geometric:R`,
 * `dyadic-ranges`, `dyadic:H`) over sizes `2..=n`.
 *
 * # Safety
 * `spec` must be a valid C string and `out` a valid pointer.
 */
enum CrStatus cr_distribution_named(const char *spec, uint64_t n, struct CrDistribution **out);

/**
 * Reads a distribution file (first line `n`, then `k p_k` lines).
 *
 * # Safety
 * `path` must be a valid C string and `out` a valid pointer.
 */
enum CrStatus cr_distribution_from_file(const char *path, struct CrDistribution **out);

/**
 * # Safety
 * `dist` must come from this library and not be used afterwards; null is ignored.
 */
void cr_distribution_free(struct CrDistribution *dist);

/**
 * Entropy in bits of the distribution condensed onto ranges.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CrStatus cr_distribution_entropy(const struct CrDistribution *dist, double *out);

/**
 * KL divergence in bits between the condensed forms of `p` and `q`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CrStatus cr_distribution_kl(const struct CrDistribution *p,
                                 const struct CrDistribution *q,
                                 double *out);

/**
 * Probability that exactly one of `k` participants transmits with probability `p`.
 */
double cr_exact_success_prob(uint64_t k, double p);

/**
 * Runs an experiment described by `key=value` lines (the CLI config format).
 *
 * # Safety
 * `config` must be a valid C string and `out` a valid pointer.
 */
enum CrStatus cr_run_experiment(const char *config, struct CrResultTable **out);

/**
 * # Safety
 * `table` must come from this library and not be used afterwards; null is ignored.
 */
void cr_result_free(struct CrResultTable *table);

/**
 * Number of rows; 0 for null.
 *
 * # Safety
 * `table` must be valid or null.
 */
size_t cr_result_len(const struct CrResultTable *table);

/**
 * # Safety
 * Pointers must be valid.
 */
enum CrStatus cr_result_row(const struct CrResultTable *table,
                            size_t index,
                            struct CrTrialRow *out);

/**
 * Fraction of trials solved within `budget` rounds.
 *
 * # Safety
 * Pointers must be valid.
 */
enum CrStatus cr_result_success_within(const struct CrResultTable *table,
                                       uint64_t budget,
                                       struct CrProportion *out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum CrStatus cr_result_mean_rounds(const struct CrResultTable *table, double *out);

/**
 * The table as CSV; free the string with [`cr_string_free`].
 *
 * # Safety
 * Pointers must be valid.
 */
enum CrStatus cr_result_to_csv(const struct CrResultTable *table, char **out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum CrStatus cr_result_write_csv(const struct CrResultTable *table, const char *path);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards; null is ignored.
 */
void cr_string_free(char *s);

/**
 * Runs a deterministic advice scheme with `b` bits on the participants
 * `ids[0..len]` of a universe of `n`. Writes the round of the first lone
 * transmission and its sender; `winner` is `UINT64_MAX` if unsolved.
 *
 * # Safety
 * `ids` must point to `len` readable values; outputs must be valid.
 */
enum CrStatus cr_det_advice_run(enum CrDetScheme scheme,
                                uint64_t n,
                                uint32_t b,
                                const uint64_t *ids,
                                size_t len,
                                uint64_t *rounds,
                                uint64_t *winner);

/**
 * Checks whether `family[0..len]` (subsets of `{0..n-1}` as bit masks) is
 * `(n, k)`-strongly selective. When it is not, writes a set `Z` and an
 * element `z` of it that no member isolates.
 *
 * # Safety
 * `family` must point to `len` readable masks (or be null with `len == 0`);
 * outputs must be valid.
 */
enum CrStatus cr_is_strongly_selective(const uint32_t *family,
                                       size_t len,
                                       uint32_t n,
                                       uint32_t k,
                                       bool *holds,
                                       uint32_t *witness_set,
                                       uint32_t *witness_element);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONTENTION_H */
