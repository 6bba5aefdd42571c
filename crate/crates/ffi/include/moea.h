#ifndef MOEA_H
#define MOEA_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define MOEA_FAMILY_ONE_MIN_MAX 0

#define MOEA_FAMILY_LOTZ 1

#define MOEA_FAMILY_ONE_JUMP_ZERO_JUMP 2

#define MOEA_ALGORITHM_SPEA2 0

#define MOEA_ALGORITHM_GSEMO 1

#define MOEA_ALGORITHM_SEMO 2

/**
 * Selects the algorithm's own operator: bit-wise for SPEA2 and GSEMO, one-bit for SEMO.
 */
#define MOEA_MUTATION_DEFAULT 0

#define MOEA_MUTATION_BITWISE 1

#define MOEA_MUTATION_ONEBIT 2

typedef enum MoeaStatus {
  MOEA_STATUS_OK = 0,
  MOEA_STATUS_NULL_POINTER = 1,
  MOEA_STATUS_INVALID_ARGUMENT = 2,
  MOEA_STATUS_LENGTH_MISMATCH = 3,
  MOEA_STATUS_OVERFLOW = 4,
  MOEA_STATUS_PANIC = 5,
  MOEA_STATUS_INTERNAL = 6,
} MoeaStatus;

/**
 * Opaque problem instance; create with [`moea_problem_new`], release with
 * [`moea_problem_free`].
 */
typedef struct MoeaProblem MoeaProblem;

/**
 * Run parameters. Zero in `mu`, `archive`, `density_k` or `budget` selects
 * the default: μ̄ = required archive size, μ = μ̄, automatic k, and 100
 * times the runtime bound.
 */
typedef struct MoeaRunConfig {
  uint32_t algorithm;
  uint32_t mutation;
  size_t mu;
  size_t archive;
  size_t density_k;
  uint64_t budget;
  uint64_t seed;
} MoeaRunConfig;

typedef struct MoeaRunSummary {
  uint64_t evaluations;
  uint64_t generations;
  bool success;
  double final_coverage;
  size_t peak_population;
  size_t mu;
  size_t archive;
  uint64_t budget;
} MoeaRunSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *moea_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *moea_version(void);

/**
 * Creates a problem instance. `k` is the jump size for OneJumpZeroJump and
 * must be 0 for the other families.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum MoeaStatus moea_problem_new(uint32_t family_code,
                                 size_t m,
                                 size_t n,
                                 size_t k,
                                 struct MoeaProblem **out);

/**
 * Releases a problem. Null is ignored.
 *
 * # Safety
 * `problem` must be null or a pointer from [`moea_problem_new`] not yet freed.
 */
void moea_problem_free(struct MoeaProblem *problem);

/**
 * Number of objectives m.
 *
 * # Safety
 * `problem` must be a live handle; `out` must be valid for writing.
 */
enum MoeaStatus moea_problem_objectives(const struct MoeaProblem *problem, size_t *out);

/**
 * Evaluates `len` bits, one byte per bit (0 or 1), into `objectives`, which
 * must hold `objectives_len` >= m values.
 *
 * # Safety
 * `bits` must be readable for `len` bytes and `objectives` writable for
 * `objectives_len` values.
 */
enum MoeaStatus moea_problem_evaluate(const struct MoeaProblem *problem,
                                      const uint8_t *bits,
                                      size_t len,
                                      uint32_t *objectives,
                                      size_t objectives_len);

/**
 * Number of Pareto-optimal objective vectors.
 *
 * # Safety
 * `problem` must be a live handle; `out` must be valid for writing.
 */
enum MoeaStatus moea_problem_front_size(const struct MoeaProblem *problem, uint64_t *out);

/**
 * Largest possible set of mutually non-dominated objective vectors.
 *
 * # Safety
 * `problem` must be a live handle; `out` must be valid for writing.
 */
enum MoeaStatus moea_problem_required_archive_size(const struct MoeaProblem *problem,
                                                   uint64_t *out);

/**
 * Fills `config` with the defaults: SPEA2, default mutation, seed 0.
 *
 * # Safety
 * `config` must be valid for writing.
 */
enum MoeaStatus moea_run_config_default(struct MoeaRunConfig *config);

/**
 * Runs one seeded trial until the front is covered or the budget is spent.
 *
 * # Safety
 * `problem` must be a live handle, `config` readable, `summary` writable.
 */
enum MoeaStatus moea_run(const struct MoeaProblem *problem,
                         const struct MoeaRunConfig *config,
                         struct MoeaRunSummary *summary);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOEA_H */
