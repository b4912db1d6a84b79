#ifndef QMF_H
#define QMF_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result of every fallible call.
 */
typedef enum QmfStatus {
  QMF_STATUS_OK = 0,
  QMF_STATUS_NULL_POINTER = 1,
  QMF_STATUS_INVALID_ARGUMENT = 2,
  QMF_STATUS_SIZE_LIMIT = 3,
  QMF_STATUS_DOMAIN = 4,
  QMF_STATUS_INVALID_DISTRIBUTION = 5,
  QMF_STATUS_PARSE = 6,
  QMF_STATUS_NOT_HERMITIAN = 7,
  QMF_STATUS_DIMENSION_MISMATCH = 8,
  QMF_STATUS_QUADRATURE_INADEQUATE = 9,
  QMF_STATUS_NON_CONVERGENCE = 10,
  QMF_STATUS_CONTRACT_VIOLATION = 11,
  QMF_STATUS_CONFIG = 12,
  QMF_STATUS_IO = 13,
  QMF_STATUS_PANIC = 14,
} QmfStatus;

/**
 * Distribution of the site fields.
 */
typedef struct QmfDistribution QmfDistribution;

/**
 * `Lambda(h) = E log 2 cosh |h + b|` with cached nodes.
 */
typedef struct QmfLambda QmfLambda;

/**
 * Polynomial symbol `V(m)`.
 */
typedef struct QmfSymbol QmfSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread. Valid until the next failing call.
 */
const char *qmf_last_error(void);

/**
 * Library version as a static string.
 */
const char *qmf_version(void);

/**
 * Parses a symbol such as `"z^2; -0.5*x*y"`.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `result` a valid pointer.
 */
enum QmfStatus qmf_symbol_parse(const char *src, struct QmfSymbol **result);

/**
 * # Safety
 * `symbol` must come from `qmf_symbol_parse` and not be used afterwards. Null is ignored.
 */
void qmf_symbol_free(struct QmfSymbol *symbol);

/**
 * `V(m)` for `|m| <= 1`.
 *
 * # Safety
 * `m` points to three doubles; `value` is writable.
 */
enum QmfStatus qmf_symbol_eval(const struct QmfSymbol *symbol, const double *m, double *value);

/**
 * Reads a distribution from JSON, e.g. `{"kind":"gaussian","mean":[0,0,0],"sigma":1}`.
 *
 * # Safety
 * `json` must be NUL-terminated and `result` valid.
 */
enum QmfStatus qmf_distribution_from_json(const char *json, struct QmfDistribution **result);

/**
 * # Safety
 * `dist` must come from `qmf_distribution_from_json`. Null is ignored.
 */
void qmf_distribution_free(struct QmfDistribution *dist);

/**
 * Builds an evaluator; `method_json` may be null for the automatic method.
 *
 * # Safety
 * Pointers must be valid; `method_json` NUL-terminated if non-null.
 */
enum QmfStatus qmf_lambda_new(const struct QmfDistribution *dist,
                              const char *method_json,
                              struct QmfLambda **result);

/**
 * # Safety
 * `ev` must come from `qmf_lambda_new`. Null is ignored.
 */
void qmf_lambda_free(struct QmfLambda *ev);

/**
 * `Lambda(h)`
 *
 * # Safety
 * `h` points to three doubles; `value` is writable.
 */
enum QmfStatus qmf_lambda_value(const struct QmfLambda *ev, const double *h, double *value);

/**
 * `grad Lambda(h)` written to `gradient[0..3]`.
 *
 * # Safety
 * `h` and `gradient` point to three doubles each.
 */
enum QmfStatus qmf_lambda_gradient(const struct QmfLambda *ev, const double *h, double *gradient);

/**
 * `Lambda*(m)` and, if `field` is non-null, the dual field `h(m)`.
 *
 * # Safety
 * `m` points to three doubles, `value` is writable, `field` is null or holds three doubles.
 */
enum QmfStatus qmf_lambda_star(const struct QmfLambda *ev,
                               const double *m,
                               double *value,
                               double *field);

/**
 * `sup_{|m| <= 1} V(m) - Lambda*(m)` with default optimizer settings.
 *
 * # Safety
 * `value` is writable; `maximizer` is null or holds three doubles.
 */
enum QmfStatus qmf_variational_pressure(const struct QmfSymbol *symbol,
                                        const struct QmfLambda *ev,
                                        double *value,
                                        double *maximizer);

/**
 * `max_r I(r) + max_Omega V(r e(Omega))`
 *
 * # Safety
 * `value` is writable; `maximizer` is null or holds three doubles.
 */
enum QmfStatus qmf_deterministic_pressure(const struct QmfSymbol *symbol,
                                          double *value,
                                          double *maximizer);

/**
 * Exact `p_N` for fields sampled from `dist` with `seed`.
 *
 * # Safety
 * Handles must be valid; `value` is writable.
 */
enum QmfStatus qmf_finite_pressure(const struct QmfSymbol *symbol,
                                   const struct QmfDistribution *dist,
                                   size_t n_sites,
                                   uint64_t seed,
                                   double *value);

/**
 * Multiplicity of spin `two_j / 2` in `N` spins one half.
 *
 * # Safety
 * `count` is writable.
 */
enum QmfStatus qmf_block_degeneracy(size_t n_sites, uint32_t two_j, uint64_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMF_H */
