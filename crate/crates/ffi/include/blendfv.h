#ifndef BLENDFV_H
#define BLENDFV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BlendfvStatus {
  BLENDFV_STATUS_OK = 0,
  BLENDFV_STATUS_NULL_POINTER = 1,
  BLENDFV_STATUS_INVALID_ARGUMENT = 2,
  BLENDFV_STATUS_INADMISSIBLE = 3,
  BLENDFV_STATUS_POSITIVITY = 4,
  BLENDFV_STATUS_CFL = 5,
  BLENDFV_STATUS_PRECONDITION = 6,
  BLENDFV_STATUS_STEP_BUDGET = 7,
  BLENDFV_STATUS_IO = 8,
  BLENDFV_STATUS_FORMAT = 9,
  BLENDFV_STATUS_PANIC = 10,
  BLENDFV_STATUS_OTHER = 11,
} BlendfvStatus;

/**
 * Two- or four-point numerical fluxes.
 */
typedef enum BlendfvFlux {
  BLENDFV_FLUX_LLF = 0,
  BLENDFV_FLUX_EC2 = 1,
  BLENDFV_FLUX_EC4 = 2,
} BlendfvFlux;

/**
 * Opaque solver state.
 */
typedef struct BlendfvSolver BlendfvSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t blendfv_last_error(char *buf, size_t len);

/**
 * Creates a solver for a benchmark.
 *
 * `scheme` is one of delft, pplft, ddlft, palft, dafermos, llf; `testcase`
 * is shu-osher or smooth-transport. `weights` (JSON file) may be null, in
 * which case ddlft uses the bundled network. `cfl <= 0` selects the default.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum BlendfvStatus blendfv_solver_new(const char *scheme,
                                      const char *testcase,
                                      size_t cells,
                                      double cfl,
                                      const char *weights,
                                      struct BlendfvSolver **out);

/**
 * Releases a solver. Null is ignored.
 *
 * # Safety
 * `solver` must come from [`blendfv_solver_new`] and not be used afterwards.
 */
void blendfv_solver_free(struct BlendfvSolver *solver);

/**
 * Advances the solution to `t_end` taking at most `max_steps` steps. On
 * failure the solver keeps its previous state.
 *
 * # Safety
 * `solver` must be a live handle.
 */
enum BlendfvStatus blendfv_solver_advance(struct BlendfvSolver *solver,
                                          double t_end,
                                          size_t max_steps);

/**
 * Number of cells.
 *
 * # Safety
 * `solver` must be a live handle.
 */
enum BlendfvStatus blendfv_solver_cells(const struct BlendfvSolver *solver, size_t *out);

/**
 * Current time and number of steps taken so far.
 *
 * # Safety
 * `solver` must be a live handle; `time` and `steps` may be null.
 */
enum BlendfvStatus blendfv_solver_time(const struct BlendfvSolver *solver,
                                       double *time,
                                       size_t *steps);

/**
 * Copies cell centers and primitive variables into caller buffers of `len`
 * entries each; any buffer may be null.
 *
 * # Safety
 * Non-null buffers must hold `len` doubles.
 */
enum BlendfvStatus blendfv_solver_copy_primitive(const struct BlendfvSolver *solver,
                                                 double *x,
                                                 double *rho,
                                                 double *v,
                                                 double *p,
                                                 size_t len);

/**
 * Copies the interface α of the last step (`cells + 1` entries). Before the
 * first step the buffer is filled with zeros.
 *
 * # Safety
 * `alpha` must hold `len` doubles.
 */
enum BlendfvStatus blendfv_solver_copy_alpha(const struct BlendfvSolver *solver,
                                             double *alpha,
                                             size_t len);

/**
 * Numerical flux between conserved states. `stencil` holds `width` states
 * of three doubles (ρ, m, E): two for LLF and ec2, four for ec4, with the
 * interface in the middle. Writes three doubles to `out`.
 *
 * # Safety
 * `stencil` must hold `3 * width` doubles and `out` three.
 */
enum BlendfvStatus blendfv_flux(enum BlendfvFlux kind,
                                const double *stencil,
                                size_t width,
                                double *out);

/**
 * Projection target `α = 1 − clamp((h−g)·(f−g)/|h−g|², 0, 1)` for three
 * interface fluxes of three doubles each.
 *
 * # Safety
 * `f`, `g`, `h` must hold three doubles; `out` must be writable.
 */
enum BlendfvStatus blendfv_alpha_target(const double *f,
                                        const double *g,
                                        const double *h,
                                        double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLENDFV_H */
