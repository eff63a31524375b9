/* C interface to the nsem engine: exact reasoning over acyclic
 * nondeterministic structural equation models. All handles are opaque;
 * strings returned through out-parameters are owned by the library and
 * must be released with nsem_string_free. */

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes for every fallible call.
 */
typedef enum NsemStatus {
  NSEM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  NSEM_STATUS_NULL_ARGUMENT = 1,
  /**
   * An argument was not valid UTF-8.
   */
  NSEM_STATUS_INVALID_UTF8 = 2,
  /**
   * JSON, formula, or assignment text failed to parse.
   */
  NSEM_STATUS_SYNTAX = 3,
  /**
   * The model violates a structural invariant.
   */
  NSEM_STATUS_VALIDATION = 4,
  /**
   * A semantic precondition failed (world not a solution, state outside
   * the support, intervention on an unknown variable, ...).
   */
  NSEM_STATUS_PRECONDITION = 5,
} NsemStatus;

/**
 * Opaque handle to a validated model.
 */
typedef struct NsemModel NsemModel;

/**
 * Opaque handle to a validated probabilistic model.
 */
typedef struct NsemPModel NsemPModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Owned by the library;
 * do not free. Valid until the next failing call on the same thread.
 */
const char *nsem_last_error(void);

/**
 * Frees a string returned through an out-parameter.
 *
 * # Safety
 * `s` must be a pointer previously returned by this library and not yet
 * freed, or null.
 */
void nsem_string_free(char *s);

/**
 * Parses and validates a model from JSON, writing an owned handle to `out`.
 *
 * # Safety
 * `json` must point to a NUL-terminated string and `out` to writable memory.
 */
enum NsemStatus nsem_model_from_json(const char *json, struct NsemModel **out);

/**
 * # Safety
 * `model` must come from this library and not have been freed.
 */
void nsem_model_free(struct NsemModel *model);

/**
 * Validates model JSON without constructing a handle. Writes the full report
 * ("valid" when well-formed) to `out_report`.
 *
 * # Safety
 * As for [`nsem_model_from_json`]; `out_report` must be writable.
 */
enum NsemStatus nsem_model_validate_json(const char *json, char **out_report);

/**
 * Serializes a model back to its JSON document.
 *
 * # Safety
 * `model` must be a live handle; `out_json` must be writable.
 */
enum NsemStatus nsem_model_to_json(const struct NsemModel *model, char **out_json);

/**
 * Enumerates solutions as a JSON array of name-to-value objects, optionally
 * restricted to a context given as `U=0,W=1` (null for no restriction).
 *
 * # Safety
 * `model` must be a live handle; `out_json` must be writable.
 */
enum NsemStatus nsem_solutions_json(const struct NsemModel *model,
                                    const char *context,
                                    char **out_json);

/**
 * Evaluates a causal formula. `world` and `context` select the setting
 * level: pass a world for counterfactual evaluation, a context (possibly
 * empty text for models without exogenous variables) for interventionist
 * evaluation, or neither for model-level evaluation. Writes the verdict to
 * `out`.
 *
 * # Safety
 * `model` must be a live handle; strings NUL-terminated; `out` writable.
 */
enum NsemStatus nsem_eval(const struct NsemModel *model,
                          const char *formula,
                          const char *world,
                          const char *context,
                          bool *out);

/**
 * Writes the actualized refinement of the model at a solution world.
 *
 * # Safety
 * `model` must be a live handle; `world` NUL-terminated; `out` writable.
 */
enum NsemStatus nsem_refine(const struct NsemModel *model,
                            const char *world,
                            struct NsemModel **out);

/**
 * Writes the intervened model for an intervention given as `Y=1,X=0`.
 *
 * # Safety
 * `model` must be a live handle; `do_text` NUL-terminated; `out` writable.
 */
enum NsemStatus nsem_intervene(const struct NsemModel *model,
                               const char *do_text,
                               struct NsemModel **out);

/**
 * Parses and validates a probabilistic model from JSON.
 *
 * # Safety
 * As for [`nsem_model_from_json`].
 */
enum NsemStatus nsem_pmodel_from_json(const char *json, struct NsemPModel **out);

/**
 * # Safety
 * `pmodel` must come from this library and not have been freed.
 */
void nsem_pmodel_free(struct NsemPModel *pmodel);

/**
 * Exact counterfactual probability `P*(phi | do(iv), world)`, written as a
 * rational string such as `4/5`.
 *
 * # Safety
 * `pmodel` must be a live handle; strings NUL-terminated; `out` writable.
 */
enum NsemStatus nsem_counterfactual_probability(const struct NsemPModel *pmodel,
                                                const char *world,
                                                const char *do_text,
                                                const char *phi,
                                                char **out);

/**
 * Counterfactual distribution of a causal Bayesian network as a JSON array
 * of `{state, prob}` entries. With `induce` true the model's exogenous
 * variables are marginalized out first; otherwise the model must already be
 * exogenous-free.
 *
 * # Safety
 * `json`, `state`, `do_text` NUL-terminated; `out` writable.
 */
enum NsemStatus nsem_cbn_counterfactual_json(const char *json,
                                             bool induce,
                                             const char *state,
                                             const char *do_text,
                                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
