/* C interface to the smbs semi-Markov inference library. */

#ifndef SMBS_H
#define SMBS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every FFI call.
 */
typedef enum SmbsStatus {
  SmbsStatus_Ok = 0,
  SmbsStatus_NullArgument = 1,
  SmbsStatus_InvalidUtf8 = 2,
  SmbsStatus_ParseError = 3,
  SmbsStatus_DomainError = 4,
  SmbsStatus_BufferTooSmall = 5,
  SmbsStatus_Panic = 6,
} SmbsStatus;

/**
 * Opaque model handle: a state space plus prior (or posterior) parameters.
 */
typedef struct SmbsModel SmbsModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or NULL.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *smbs_last_error_message(void);

/**
 * Build a model from a JSON description with `states` and `prior` blocks.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer. The
 * returned handle must be released with [`smbs_model_free`].
 */
enum SmbsStatus smbs_model_from_json(const char *json, struct SmbsModel **out);

/**
 * # Safety
 * `handle` must come from this library and not have been freed already.
 */
void smbs_model_free(struct SmbsModel *handle);

/**
 * # Safety
 * `handle` must be a live model handle; `out` must be valid.
 */
enum SmbsStatus smbs_model_n_states(const struct SmbsModel *handle, uintptr_t *out);

/**
 * External id of the state at `index` (in `0..n_states`).
 *
 * # Safety
 * `handle` must be a live model handle; `out` must be valid.
 */
enum SmbsStatus smbs_model_state_id(const struct SmbsModel *handle, uintptr_t index, uint32_t *out);

/**
 * Conjugate update on one observed path; writes a new handle.
 *
 * # Safety
 * `handle` must be live, `path` must point to `len` readable ids, and
 * `out` must be valid.
 */
enum SmbsStatus smbs_model_posterior(const struct SmbsModel *handle,
                                     const uint32_t *path,
                                     uintptr_t len,
                                     struct SmbsModel **out);

/**
 * One-step predictive pmf of the state after the observed path, written to
 * `out_probs[0..n_states]` in state-space order.
 *
 * # Safety
 * `handle` must be live, `path` must point to `len` readable ids, and
 * `out_probs` must hold at least `out_len` writable doubles.
 */
enum SmbsStatus smbs_predictive_kernel(const struct SmbsModel *handle,
                                       const uint32_t *path,
                                       uintptr_t len,
                                       double *out_probs,
                                       uintptr_t out_len);

/**
 * Extend the observed path by `steps` draws from the reinforced predictive
 * process; writes `len + steps` ids into `out_ids`.
 *
 * # Safety
 * `handle` must be live, `path` must point to `len` readable ids, and
 * `out_ids` must hold at least `out_cap` writable entries.
 */
enum SmbsStatus smbs_extend_path(const struct SmbsModel *handle,
                                 const uint32_t *path,
                                 uintptr_t len,
                                 uintptr_t steps,
                                 uint64_t seed,
                                 uint32_t *out_ids,
                                 uintptr_t out_cap);

/**
 * Monte Carlo forecast: `P(S_{t+h} = j | path)` for `h = 1..=horizon`,
 * written row-major (`horizon` rows of `n_states` probabilities).
 *
 * # Safety
 * `handle` must be live, `path` must point to `len` readable ids, and
 * `out_probs` must hold at least `out_cap` writable doubles.
 */
enum SmbsStatus smbs_h_step_predict(const struct SmbsModel *handle,
                                    const uint32_t *path,
                                    uintptr_t len,
                                    uint64_t horizon,
                                    uint64_t n_sims,
                                    uint64_t seed,
                                    double *out_probs,
                                    uintptr_t out_cap);

/**
 * Posterior mean CDF of the holding time of `state_id` at `t`.
 *
 * # Safety
 * `handle` must be live and `out` a valid pointer.
 */
enum SmbsStatus smbs_holding_mean(const struct SmbsModel *handle,
                                  uint32_t state_id,
                                  uint64_t t,
                                  double *out);

/**
 * Prior/posterior mean transition probability from `from_id` to `to_id`.
 *
 * # Safety
 * `handle` must be live and `out` a valid pointer.
 */
enum SmbsStatus smbs_transition_mean(const struct SmbsModel *handle,
                                     uint32_t from_id,
                                     uint32_t to_id,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SMBS_H */
