#ifndef CHIRALSG_H
#define CHIRALSG_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CSG_PRESET_FIG3ABC 0

#define CSG_PRESET_FIG3DEF 1

#define CSG_CHIRALITY_LEFT 0

#define CSG_CHIRALITY_RIGHT 1

#define CSG_CONVENTION_PAPER 0

#define CSG_CONVENTION_STANDARD 1

/**
 * Species codes: 0 L_up, 1 L_down, 2 R_up, 3 R_down.
 */
#define CSG_SPECIES_COUNT 4

/**
 * Result codes.
 */
typedef enum CsgStatus {
  CSG_STATUS_OK = 0,
  CSG_STATUS_NULL_POINTER = 1,
  /**
   * Bad parameter values or enum codes.
   */
  CSG_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Integration produced a non-finite state, or another physics failure.
   */
  CSG_STATUS_PHYSICS = 3,
  /**
   * Index past the end of a result.
   */
  CSG_STATUS_OUT_OF_RANGE = 4,
  /**
   * Internal panic caught at the boundary.
   */
  CSG_STATUS_PANIC = 5,
} CsgStatus;

/**
 * Opaque field model.
 */
typedef struct CsgModel CsgModel;

/**
 * Opaque simulation result.
 */
typedef struct CsgResult CsgResult;

/**
 * Physical inputs in SI units (rad/s, m, m/s²); geometry in wavelengths.
 */
typedef struct CsgPhysicalParams {
  double wavelength;
  double mass_factor;
  double detuning;
  double rabi_12;
  double rabi_13;
  double rabi_23;
  double sigma_12;
  double sigma_13;
  double sigma_23;
  double beam_offset;
  double k13_ratio;
  double k23_ratio;
  double gravity;
  double ensemble_width;
} CsgPhysicalParams;

/**
 * Gauge data at one x in simulation units (A in units of k₁₂, B in k₁₂²).
 */
typedef struct CsgFieldPoint {
  double a_up;
  double a_down;
  double v_up;
  double v_down;
  double b_up;
  double b_down;
  double theta;
  double dtheta_dx;
} CsgFieldPoint;

typedef struct CsgState {
  double x;
  double z;
  double px;
  double pz;
} CsgState;

typedef struct CsgRecord {
  uint32_t species;
  uint64_t particle_id;
  struct CsgState state;
} CsgRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL,
 * or 0 if there is none. `buf` may be NULL to query the length.
 *
 * # Safety
 * `buf` must be NULL or valid for `len` bytes of writes.
 */
size_t csg_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *csg_version(void);

/**
 * Fills `out` with a preset's physical parameters.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum CsgStatus csg_preset_params(uint32_t preset_code, struct CsgPhysicalParams *out);

/**
 * Builds a model from physical parameters. Free with [`csg_model_free`].
 *
 * # Safety
 * `params` must point to a valid struct; `out` must be valid for writes.
 */
enum CsgStatus csg_model_new(const struct CsgPhysicalParams *params,
                             uint32_t convention_code,
                             struct CsgModel **out);

/**
 * Releases a model. NULL is ignored.
 *
 * # Safety
 * `model` must be NULL or a pointer from [`csg_model_new`] not yet freed.
 */
void csg_model_free(struct CsgModel *model);

/**
 * Simulation time unit T₀ in seconds.
 *
 * # Safety
 * `model` must be a live model handle.
 */
double csg_model_time_unit(const struct CsgModel *model);

/**
 * Gauge fields at position x (units of λ) for one chirality.
 *
 * # Safety
 * `model` must be a live handle; `out` must be valid for writes.
 */
enum CsgStatus csg_model_fields(const struct CsgModel *model,
                                double x,
                                uint32_t chirality_code,
                                struct CsgFieldPoint *out);

/**
 * Reduced eigenvalues (λ₁, λ₂) and the three exact eigenvalues (ascending)
 * of the full three-level Hamiltonian at (x, z).
 *
 * # Safety
 * `model` must be a live handle; `reduced` must hold 2 and `exact` 3 doubles.
 */
enum CsgStatus csg_model_levels(const struct CsgModel *model,
                                double x,
                                double z,
                                uint32_t chirality_code,
                                double *reduced,
                                double *exact);

/**
 * Advances one particle by `steps` RK4 steps of size `dt` (may be negative).
 *
 * # Safety
 * `model` must be a live handle; `state` must be valid for reads and writes.
 */
enum CsgStatus csg_propagate(const struct CsgModel *model,
                             uint32_t species_code,
                             struct CsgState *state,
                             double dt,
                             uint64_t steps);

/**
 * Runs the four-species experiment. `times` lists the snapshot times in
 * simulation units (ascending, first 0, last = `t_final`). Free the result
 * with [`csg_result_free`].
 *
 * # Safety
 * `model` must be a live handle, `times` valid for `n_times` reads and
 * `out` valid for writes.
 */
enum CsgStatus csg_simulate(const struct CsgModel *model,
                            uint64_t particles_per_species,
                            double sigma_r,
                            uint64_t seed,
                            double dt,
                            const double *times,
                            size_t n_times,
                            struct CsgResult **out);

/**
 * Releases a result. NULL is ignored.
 *
 * # Safety
 * `result` must be NULL or a pointer from [`csg_simulate`] not yet freed.
 */
void csg_result_free(struct CsgResult *result);

/**
 * Number of snapshots, 0 for NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle.
 */
size_t csg_result_snapshot_count(const struct CsgResult *result);

/**
 * Time and record count of snapshot `index`.
 *
 * # Safety
 * `result` must be a live handle; `time` and `records` valid for writes.
 */
enum CsgStatus csg_result_snapshot_info(const struct CsgResult *result,
                                        size_t index,
                                        double *time,
                                        size_t *records);

/**
 * Copies the records of snapshot `index` into `buf`, which must hold at
 * least the count reported by [`csg_result_snapshot_info`].
 *
 * # Safety
 * `result` must be a live handle; `buf` valid for `cap` writes.
 */
enum CsgStatus csg_result_records(const struct CsgResult *result,
                                  size_t index,
                                  struct CsgRecord *buf,
                                  size_t cap);

/**
 * Centroid (x̄, z̄) of one species at snapshot `index`.
 *
 * # Safety
 * `result` must be a live handle; `x` and `z` valid for writes.
 */
enum CsgStatus csg_result_centroid(const struct CsgResult *result,
                                   size_t index,
                                   uint32_t species_code,
                                   double *x,
                                   double *z);

/**
 * Species code of a chirality and spin (spin 0 up, 1 down).
 */
uint32_t csg_species_code(uint32_t chirality_code, uint32_t spin);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHIRALSG_H */
