#ifndef NEMATIC_H
#define NEMATIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes. The failure codes of a run match the command-line exit codes.
 */
typedef enum NematicStatus {
  NEMATIC_STATUS_OK = 0,
  NEMATIC_STATUS_NULL_POINTER = 1,
  NEMATIC_STATUS_INVALID_UTF8 = 2,
  NEMATIC_STATUS_CONFIG = 3,
  NEMATIC_STATUS_IO = 4,
  NEMATIC_STATUS_PANIC = 5,
  NEMATIC_STATUS_BUFFER_TOO_SMALL = 6,
  NEMATIC_STATUS_INVALID_ARGUMENT = 7,
  NEMATIC_STATUS_PICARD_FAILURE = 10,
  NEMATIC_STATUS_PRINCIPLE = 11,
  NEMATIC_STATUS_NON_FINITE = 12,
} NematicStatus;

/*
 Opaque simulation handle.
 */
typedef struct NematicSim NematicSim;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Create a simulation from a JSON run configuration.

 # Safety
 `config_json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NematicStatus nematic_sim_new_from_config_json(const char *config_json,
                                                    struct NematicSim **out);

/*
 Release a simulation. Null is ignored.

 # Safety
 `sim` must come from [`nematic_sim_new_from_config_json`] and not be used afterwards.
 */
void nematic_sim_free(struct NematicSim *sim);

/*
 Advance `steps` time steps, stopping at the first failure. The handle
 keeps the last committed state.

 # Safety
 `sim` must be a live handle.
 */
enum NematicStatus nematic_sim_step(struct NematicSim *sim, uint64_t steps);

/*
 # Safety
 `sim` must be a live handle and `out` a valid pointer.
 */
enum NematicStatus nematic_sim_time(const struct NematicSim *sim, double *out);

/*
 Points per axis.

 # Safety
 `sim` must be a live handle and `out` a valid pointer.
 */
enum NematicStatus nematic_sim_grid_n(const struct NematicSim *sim, size_t *out);

/*
 Diagnostics record of the current step as a JSON string, to be released
 with [`nematic_string_free`].

 # Safety
 `sim` must be a live handle and `out` a valid pointer.
 */
enum NematicStatus nematic_sim_diagnostics_json(const struct NematicSim *sim, char **out);

/*
 Release a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void nematic_string_free(char *s);

/*
 Write the current state as a binary snapshot.

 # Safety
 `sim` must be a live handle and `path` a NUL-terminated string.
 */
enum NematicStatus nematic_sim_write_snapshot(const struct NematicSim *sim, const char *path);

/*
 Copy the nodal values of one component (`u1 u2 u3 theta d1 d2 d3 p`,
 numbered from 0) into `buf`, which must hold `n^3` values.

 # Safety
 `sim` must be a live handle and `buf` valid for `len` writes.
 */
enum NematicStatus nematic_sim_copy_field(const struct NematicSim *sim,
                                          size_t component,
                                          double *buf,
                                          size_t len);

/*
 Copy the last error message into `buf` (NUL-terminated, truncated to
 fit). Returns the full message length in bytes without the NUL.

 # Safety
 `buf` must be valid for `len` writes, or null with `len = 0`.
 */
size_t nematic_last_error_message(char *buf, size_t len);

/*
 Penalty `W(d) = (|d|^2 - 1)^2` and its half-gradient `(|d|^2 - 1) d`.

 # Safety
 `d` and `force` must point to three values, `energy` to one.
 */
enum NematicStatus nematic_ginzburg_landau(const double *d, double *energy, double *force);

/*
 Fit `dF/dt = C F^4` to a sampled series; `t_star` is infinite when no
 growth is detected.

 # Safety
 `times` and `values` must hold `len` values; `c_fit` and `t_star` must be valid.
 */
enum NematicStatus nematic_blowup_monitor(const double *times,
                                          const double *values,
                                          size_t len,
                                          double *c_fit,
                                          double *t_star);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEMATIC_H */
