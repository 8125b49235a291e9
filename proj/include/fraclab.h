/* fraclab - numerical laboratory for the Dirichlet fractional Laplacian on
 * doubly symmetric domains.
 *
 * C interface of the shared library: opaque handles, integer status codes,
 * and a few stateless kernel evaluators. All functions returning
 * fraclab_status report FRACLAB_OK (0) on success; on failure a message is
 * available from fraclab_experiment_error() (handle-bound calls) and the
 * handle is left in a defined state.
 */

#ifndef FRACLAB_H
#define FRACLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fraclab_status {
  FRACLAB_OK = 0,
  FRACLAB_ERR_INVALID_ARGUMENT = 1,
  FRACLAB_ERR_PARSE = 2,          /* config unreadable or malformed */
  FRACLAB_ERR_VALIDATION = 3,     /* config read but invariants violated */
  FRACLAB_ERR_SOLVER = 4,         /* a solver failed to converge */
  FRACLAB_ERR_VERIFICATION = 5,   /* run finished but a check failed */
  FRACLAB_ERR_IO = 6,
  FRACLAB_ERR_INTERNAL = 7
} fraclab_status;

/* Opaque experiment handle: configuration + results of the last run. */
typedef struct fraclab_experiment fraclab_experiment;

const char* fraclab_version(void);

fraclab_status fraclab_experiment_create(fraclab_experiment** out);
void fraclab_experiment_destroy(fraclab_experiment* exp);

/* Loads and validates a config file (or an in-memory config text). On
 * FRACLAB_ERR_VALIDATION the error message lists every violated field. */
fraclab_status fraclab_experiment_load_config(fraclab_experiment* exp,
                                              const char* path);
fraclab_status fraclab_experiment_load_config_text(fraclab_experiment* exp,
                                                   const char* text);

/* Overrides applied after a successful load. */
fraclab_status fraclab_experiment_set_output_dir(fraclab_experiment* exp,
                                                 const char* dir);
fraclab_status fraclab_experiment_set_seed(fraclab_experiment* exp, uint64_t seed);
fraclab_status fraclab_experiment_set_threads(fraclab_experiment* exp, int threads);

/* Executes the configured tasks and writes report.json, checks.csv,
 * values.csv, summary.txt plus field dumps into the output directory.
 * Returns FRACLAB_ERR_VERIFICATION when the run completed but a check
 * failed or a task reported failure. */
fraclab_status fraclab_experiment_run(fraclab_experiment* exp);

/* Views into the handle; valid until the next call on the same handle. */
const char* fraclab_experiment_report_json(const fraclab_experiment* exp);
const char* fraclab_experiment_summary(const fraclab_experiment* exp);
const char* fraclab_experiment_error(const fraclab_experiment* exp);

/* Stateless evaluators. `dim` is the kernel order N of c_{N,s}|z|^(-N-2s). */
fraclab_status fraclab_normalization_constant(int dim, double s, double* out);
fraclab_status fraclab_f_surrogate(double a, double b, double big_m, int dim,
                                   double s, double* out);
/* Four-point kernel deficit for points x, y (length point_dim >= 2) with
 * hyperplanes x_axis1 = level1 and x_axis2 = level2 (0-based axes). */
fraclab_status fraclab_four_point_deficit(int dim, double s, int point_dim,
                                          const double* x, const double* y,
                                          int axis1, double level1, int axis2,
                                          double level2, double* out);

#ifdef __cplusplus
}
#endif

#endif /* FRACLAB_H */
