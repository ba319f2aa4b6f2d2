#ifndef PROJENT_H
#define PROJENT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes returned by every fallible function.
 */
typedef enum ProjentStatus {
  PROJENT_STATUS_OK = 0,
  PROJENT_STATUS_NULL_POINTER = 1,
  PROJENT_STATUS_INVALID_ARGUMENT = 2,
  PROJENT_STATUS_NOT_DENSITY = 3,
  PROJENT_STATUS_CAPACITY_EXCEEDED = 4,
  PROJENT_STATUS_SOLVER_FAILURE = 5,
  PROJENT_STATUS_WRONG_REGIME = 6,
  PROJENT_STATUS_PANIC = 7,
} ProjentStatus;

/**
 * Which set-optimized measure [`projent_set_measure`] evaluates.
 */
typedef enum ProjentMeasure {
  PROJENT_MEASURE_DPROJ = 0,
  PROJENT_MEASURE_DMAX = 1,
  PROJENT_MEASURE_ROBUSTNESS = 2,
  PROJENT_MEASURE_DPROJ_S = 3,
} ProjentMeasure;

/**
 * Opaque free cone.
 */
typedef struct ProjentCone ProjentCone;

/**
 * Opaque density matrix.
 */
typedef struct ProjentState ProjentState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *projent_version(void);

/**
 * Message of the last failure on this thread, or null if none.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *projent_last_error(void);

/**
 * Creates a state from a row-major `dim × dim` matrix.
 *
 * `im` may be null for a real matrix. `subsystem_dims` may be null when
 * `n_subsystems` is 0.
 *
 * # Safety
 * `re` (and `im` if non-null) must point to `dim * dim` doubles,
 * `subsystem_dims` to `n_subsystems` sizes, and `out` must be writable.
 */
enum ProjentStatus projent_state_new(const double *re,
                                     const double *im,
                                     size_t dim,
                                     const size_t *subsystem_dims,
                                     size_t n_subsystems,
                                     struct ProjentState **out);

/**
 * Creates the isotropic state of local dimension `d` and fidelity `p`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ProjentStatus projent_state_isotropic(size_t d, double p, struct ProjentState **out);

/**
 * Dimension of a state, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t projent_state_dim(const struct ProjentState *state);

/**
 * Releases a state. Null is ignored.
 *
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void projent_state_free(struct ProjentState *state);

/**
 * PPT cone on `d_a ⊗ d_b`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ProjentStatus projent_cone_ppt(size_t d_a, size_t d_b, struct ProjentCone **out);

/**
 * Diagonal (incoherent) cone of dimension `d`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ProjentStatus projent_cone_diagonal(size_t d, struct ProjentCone **out);

/**
 * Cone generated by a single state (copied).
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
enum ProjentStatus projent_cone_singleton(const struct ProjentState *state,
                                          struct ProjentCone **out);

/**
 * Cone from its JSON descriptor.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum ProjentStatus projent_cone_from_json(const char *json, struct ProjentCone **out);

/**
 * Releases a cone. Null is ignored.
 *
 * # Safety
 * `cone` must be null or a handle not yet freed.
 */
void projent_cone_free(struct ProjentCone *cone);

/**
 * Evaluates a set-optimized measure, optionally smoothed with radius `eps`.
 *
 * `bits` receives the value (an upper bound when bracketed); `lower`, if
 * non-null, receives the certified lower bound.
 *
 * # Safety
 * Handles must be live; `bits` writable; `lower` null or writable.
 */
enum ProjentStatus projent_set_measure(enum ProjentMeasure measure,
                                       const struct ProjentState *state,
                                       const struct ProjentCone *cone,
                                       double eps,
                                       double *bits,
                                       double *lower);

/**
 * Relative entropy distance to the cone's unit-trace members.
 *
 * # Safety
 * Handles must be live; `bits` writable; `lower` null or writable.
 */
enum ProjentStatus projent_rel_entropy_set(const struct ProjentState *state,
                                           const struct ProjentCone *cone,
                                           double *bits,
                                           double *lower);

/**
 * Projective relative entropy between two states.
 *
 * # Safety
 * Handles must be live and `bits` writable.
 */
enum ProjentStatus projent_dproj(const struct ProjentState *rho,
                                 const struct ProjentState *sigma,
                                 double *bits);

/**
 * Closed-form projective divergence of an isotropic state from PPT.
 *
 * # Safety
 * `bits` must be writable.
 */
enum ProjentStatus projent_isotropic_dproj(size_t d, double p, double *bits);

/**
 * Closed-form regularized relative entropy of entanglement bound for an
 * isotropic state.
 *
 * # Safety
 * `bits` must be writable.
 */
enum ProjentStatus projent_isotropic_dsep_inf(size_t d, double p, double *bits);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROJENT_H */
