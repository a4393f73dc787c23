#ifndef SPINFACT_H
#define SPINFACT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a fallible call.
 */
typedef enum SpinfactStatus {
  SPINFACT_STATUS_OK = 0,
  SPINFACT_STATUS_NULL_POINTER = 1,
  SPINFACT_STATUS_INVALID_ARGUMENT = 2,
  SPINFACT_STATUS_PARSE = 3,
  SPINFACT_STATUS_NUMERICAL = 4,
  SPINFACT_STATUS_NOT_CONVERGED = 5,
  SPINFACT_STATUS_IO = 6,
  SPINFACT_STATUS_PANIC = 7,
} SpinfactStatus;

/**
 * A generator algebra with its structure constants.
 */
typedef struct SpinfactAlgebra SpinfactAlgebra;

/**
 * A solved factorization.
 */
typedef struct SpinfactFactorization SpinfactFactorization;

/**
 * Solver for exact product factorizations of one family's generator.
 */
typedef struct SpinfactFactorizer SpinfactFactorizer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *spinfact_version(void);

/**
 * Copy of the calling thread's most recent error message, or NULL if none.
 * Release with `spinfact_string_free`.
 */
char *spinfact_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void spinfact_string_free(char *s);

/**
 * Builds the algebra of a family (`"s2-iiab"`, `"s2-ijaa"`, `"s4-singlet"`,
 * `"s4-triplet"`) in `"appendix"` or `"discovery"` mode.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum SpinfactStatus spinfact_algebra_new(const char *family,
                                         const char *mode,
                                         struct SpinfactAlgebra **out);

/**
 * # Safety
 * `alg` must be NULL or a handle from `spinfact_algebra_new`, not yet freed.
 */
void spinfact_algebra_free(struct SpinfactAlgebra *alg);

/**
 * Writes the dimensions of the algebra, its center and its derived algebra.
 *
 * # Safety
 * `alg` must be a live handle; out-pointers must be writable.
 */
enum SpinfactStatus spinfact_algebra_dimensions(const struct SpinfactAlgebra *alg,
                                                size_t *dimension,
                                                size_t *center,
                                                size_t *derived);

/**
 * Full structure report as JSON.
 *
 * # Safety
 * `alg` must be a live handle; `out` must be writable.
 */
enum SpinfactStatus spinfact_algebra_to_json(const struct SpinfactAlgebra *alg,
                                             uint64_t seed,
                                             char **out);

/**
 * # Safety
 * `family` must be NUL-terminated; `out` must be writable.
 */
enum SpinfactStatus spinfact_factorizer_new(const char *family, struct SpinfactFactorizer **out);

/**
 * # Safety
 * `fz` must be NULL or a live factorizer handle.
 */
void spinfact_factorizer_free(struct SpinfactFactorizer *fz);

/**
 * Number of factors in the product (central plus semisimple).
 *
 * # Safety
 * `fz` must be a live handle; `count` must be writable.
 */
enum SpinfactStatus spinfact_factorizer_factor_count(const struct SpinfactFactorizer *fz,
                                                     size_t *count);

/**
 * Solves `exp(θG) = Π exp(t_k A_k)` with the default options and the given seed.
 *
 * # Safety
 * `fz` must be a live handle; `out` must be writable.
 */
enum SpinfactStatus spinfact_factorize(const struct SpinfactFactorizer *fz,
                                       double theta,
                                       uint64_t seed,
                                       struct SpinfactFactorization **out);

/**
 * # Safety
 * `fac` must be NULL or a live factorization handle.
 */
void spinfact_factorization_free(struct SpinfactFactorization *fac);

/**
 * Optimizer cost and end-to-end Fock-space error of a factorization.
 *
 * # Safety
 * `fac` must be a live handle; out-pointers must be writable.
 */
enum SpinfactStatus spinfact_factorization_residuals(const struct SpinfactFactorization *fac,
                                                     double *cost,
                                                     double *fock);

/**
 * Copies up to `len` factor angles, central factors first, into `angles`;
 * writes the total count to `count`. Pass `len = 0` to query the count.
 *
 * # Safety
 * `fac` must be a live handle; `angles` must hold `len` doubles; `count` must be writable.
 */
enum SpinfactStatus spinfact_factorization_angles(const struct SpinfactFactorization *fac,
                                                  double *angles,
                                                  size_t len,
                                                  size_t *count);

/**
 * Factorization as JSON.
 *
 * # Safety
 * `fac` must be a live handle; `out` must be writable.
 */
enum SpinfactStatus spinfact_factorization_to_json(const struct SpinfactFactorization *fac,
                                                   char **out);

/**
 * Pauli rotation schedule of a factorization as JSON, plus its distinct string count.
 *
 * # Safety
 * Handles must be live and from the same family; out-pointers must be writable.
 */
enum SpinfactStatus spinfact_schedule_json(const struct SpinfactFactorizer *fz,
                                           const struct SpinfactFactorization *fac,
                                           size_t *total_strings,
                                           char **out);

/**
 * Runs adaptive VQE from a JSON configuration and returns the run record as JSON.
 * Returns `SPINFACT_STATUS_NOT_CONVERGED` (with the record still written) if the
 * gradient threshold was not reached.
 *
 * # Safety
 * `config_json` must be NUL-terminated; `out` must be writable.
 */
enum SpinfactStatus spinfact_vqe_run_json(const char *config_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINFACT_H */
