#ifndef RADPERC_H
#define RADPERC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RadpercStatus {
  RADPERC_STATUS_OK = 0,
  RADPERC_STATUS_NULL_POINTER = 1,
  RADPERC_STATUS_INVALID_ARGUMENT = 2,
  RADPERC_STATUS_BUFFER_TOO_SMALL = 3,
  RADPERC_STATUS_FAILED = 4,
  RADPERC_STATUS_PANIC = 5,
} RadpercStatus;

typedef enum RadpercColumn {
  RADPERC_COLUMN_RHO = 0,
  RADPERC_COLUMN_RHO_SEM = 1,
  RADPERC_COLUMN_SURVIVAL = 2,
  RADPERC_COLUMN_SURVIVAL_SEM = 3,
  RADPERC_COLUMN_R2 = 4,
  RADPERC_COLUMN_R2_SEM = 5,
  RADPERC_COLUMN_FRONT = 6,
  RADPERC_COLUMN_FRONT_STD = 7,
} RadpercColumn;

typedef enum RadpercRegion {
  RADPERC_REGION_A = 0,
  RADPERC_REGION_S = 1,
  RADPERC_REGION_AS = 2,
  RADPERC_REGION_E = 3,
  RADPERC_REGION_AE = 4,
} RadpercRegion;

// Ensemble-averaged particle-process curves.
typedef struct RadpercCurves RadpercCurves;

// Stabilizer state of system, reference and environment, with its own
// random stream.
typedef struct RadpercState RadpercState;

typedef struct RadpercBranching {
  double p_both;
  double p_left;
  double p_right;
  double p_none;
} RadpercBranching;

typedef struct RadpercMeanField {
  double rho_e;
  double rho_v;
  double p_r;
  double p_l;
  double p_d;
  double v_b;
  double p_c_mf;
} RadpercMeanField;

typedef struct RadpercFit {
  double exponent;
  double exponent_err;
  double amplitude;
  double goodness;
  size_t points;
} RadpercFit;

typedef struct RadpercInfo {
  int64_t h_a;
  int64_t h_s;
  int64_t h_as;
  int64_t h_e;
  int64_t h_ae;
  int64_t ic_e;
  int64_t ic_s;
  double fidelity;
  // NaN unless the global state is pure (case 3).
  double p_succ;
  double f_pure;
} RadpercInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, empty after success.
// The pointer stays valid until the next call on the same thread.
const char *radperc_last_error(void);

// Vertex outcome probabilities. `q = 0` selects the bond limit.
enum RadpercStatus radperc_branching_probs(uint32_t q, double p, struct RadpercBranching *out);

// Mean-field densities and butterfly velocity; `q` may be `INFINITY`.
enum RadpercStatus radperc_mean_field(double q, double p, struct RadpercMeanField *out);

// Power-law fit `y ~ A t^e` over `lo <= t <= hi`.
//
// # Safety
// `t` and `y` must point to `len` readable doubles.
enum RadpercStatus radperc_fit_power_law(const double *t,
                                         const double *y,
                                         size_t len,
                                         double lo,
                                         double hi,
                                         struct RadpercFit *out);

// Runs `n_traj` trajectories on `n` sites for `depth` steps from a block
// of `block` particles at the origin (`q = 0` is the bond limit).
//
// # Safety
// `out` must be writable; the handle it receives is freed with
// [`radperc_curves_free`].
enum RadpercStatus radperc_dp_run(uint32_t q,
                                  double p,
                                  size_t n,
                                  size_t depth,
                                  uint64_t n_traj,
                                  uint64_t seed,
                                  size_t block,
                                  struct RadpercCurves **out);

// Number of time points (`depth + 1`).
//
// # Safety
// `curves` must come from [`radperc_dp_run`].
enum RadpercStatus radperc_curves_len(const struct RadpercCurves *curves, size_t *out);

// Copies one column (a [`RadpercColumn`] value) into `buf`, which must hold at least
// [`radperc_curves_len`] values.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum RadpercStatus radperc_curves_copy(const struct RadpercCurves *curves,
                                       uint32_t column,
                                       double *buf,
                                       size_t len);

// # Safety
// `curves` must come from [`radperc_dp_run`] and not be used afterwards.
void radperc_curves_free(struct RadpercCurves *curves);

// New state with `k` reference qubits entangled to the first `k` of `n`
// system qubits. `init_case` is 1, 2 or 3.
//
// # Safety
// `out` must be writable; free the handle with [`radperc_state_free`].
enum RadpercStatus radperc_state_new(uint32_t init_case,
                                     size_t n,
                                     size_t k,
                                     uint64_t seed,
                                     struct RadpercState **out);

// Advances by `steps` time units at swap rate `p`.
//
// # Safety
// `state` must come from [`radperc_state_new`].
enum RadpercStatus radperc_state_step(struct RadpercState *state, double p, size_t steps);

// Entropy in bits of a region given as a [`RadpercRegion`] value.
//
// # Safety
// `state` must come from [`radperc_state_new`].
enum RadpercStatus radperc_state_entropy(const struct RadpercState *state,
                                         uint32_t region,
                                         int64_t *out);

// # Safety
// `state` must come from [`radperc_state_new`].
enum RadpercStatus radperc_state_info(const struct RadpercState *state, struct RadpercInfo *out);

// # Safety
// `state` must come from [`radperc_state_new`] and not be used afterwards.
void radperc_state_free(struct RadpercState *state);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RADPERC_H */
