#ifndef PVCSP_H
#define PVCSP_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PvcspAlgorithm {
  PVCSP_ALGORITHM_COMBINED = 0,
  PVCSP_ALGORITHM_BLP = 1,
  PVCSP_ALGORITHM_AIP = 2,
} PvcspAlgorithm;

typedef enum PvcspStatus {
  PVCSP_STATUS_OK = 0,
  PVCSP_STATUS_NULL_ARGUMENT = 1,
  PVCSP_STATUS_INVALID_UTF8 = 2,
  PVCSP_STATUS_PARSE = 3,
  /**
   * Well-formed input the operation cannot accept (mismatched domains,
   * unknown symbols, bad weights).
   */
  PVCSP_STATUS_INPUT = 4,
  PVCSP_STATUS_RESOURCE = 5,
  PVCSP_STATUS_INVARIANT = 6,
  PVCSP_STATUS_PANIC = 7,
} PvcspStatus;

typedef enum PvcspVerdict {
  PVCSP_VERDICT_YES = 0,
  PVCSP_VERDICT_NO = 1,
  /**
   * Oracle only: neither side of the promise holds.
   */
  PVCSP_VERDICT_GAP = 2,
} PvcspVerdict;

typedef struct PvcspInstance PvcspInstance;

typedef struct PvcspMeasure PvcspMeasure;

typedef struct PvcspStructure PvcspStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next `pvcsp_*` call on the same thread.
 */
const char *pvcsp_last_error(void);

/**
 * Static, NUL-terminated crate version.
 */
const char *pvcsp_version(void);

/**
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PvcspStatus pvcsp_structure_parse(const char *text, struct PvcspStructure **out);

/**
 * # Safety
 * `s` must come from [`pvcsp_structure_parse`] and not be freed yet. NULL is ignored.
 */
void pvcsp_structure_free(struct PvcspStructure *s);

/**
 * Number of domain elements, 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live structure handle.
 */
size_t pvcsp_structure_domain_size(const struct PvcspStructure *s);

/**
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PvcspStatus pvcsp_instance_parse(const char *text, struct PvcspInstance **out);

/**
 * # Safety
 * `i` must come from [`pvcsp_instance_parse`] and not be freed yet. NULL is ignored.
 */
void pvcsp_instance_free(struct PvcspInstance *i);

/**
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PvcspStatus pvcsp_measure_parse(const char *text, struct PvcspMeasure **out);

/**
 * # Safety
 * `m` must come from [`pvcsp_measure_parse`] and not be freed yet. NULL is ignored.
 */
void pvcsp_measure_free(struct PvcspMeasure *m);

/**
 * Decides `instance` over `structure`; writes YES or NO.
 *
 * # Safety
 * Handles must be live; `verdict` must be writable.
 */
enum PvcspStatus pvcsp_solve(const struct PvcspStructure *structure,
                             const struct PvcspInstance *instance,
                             enum PvcspAlgorithm algorithm,
                             enum PvcspVerdict *verdict);

/**
 * Brute-force classification; `gamma` may be NULL for `Γ = Δ`.
 *
 * # Safety
 * `delta` and `instance` must be live handles, `gamma` live or NULL;
 * `verdict` must be writable.
 */
enum PvcspStatus pvcsp_oracle(const struct PvcspStructure *delta,
                              const struct PvcspStructure *gamma,
                              const struct PvcspInstance *instance,
                              enum PvcspVerdict *verdict);

/**
 * Checks the measure against `(delta, gamma)`: as a fractional
 * homomorphism when its arity is 1, as a polymorphism otherwise. `gamma`
 * may be NULL for `Γ = Δ`.
 *
 * # Safety
 * `measure` and `delta` must be live handles, `gamma` live or NULL; `holds`
 * must be writable.
 */
enum PvcspStatus pvcsp_check(const struct PvcspMeasure *measure,
                             const struct PvcspStructure *delta,
                             const struct PvcspStructure *gamma,
                             bool *holds);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PVCSP_H */
