/* C interface to the sisctl solver library.
 *
 * Every function returns a status code; on failure a description is
 * available from sisctl_last_error() until the next call on the same thread.
 * Objects are opaque and owned by the caller once created. */
#ifndef SISCTL_SISCTL_H
#define SISCTL_SISCTL_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(SISCTL_BUILDING)
#    define SISCTL_API __declspec(dllexport)
#  else
#    define SISCTL_API __declspec(dllimport)
#  endif
#else
#  define SISCTL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sisctl_status {
  SISCTL_OK = 0,
  SISCTL_ERR_DOMAIN = 1,
  SISCTL_ERR_VALIDATION = 2,
  SISCTL_ERR_PARSE = 3,
  SISCTL_ERR_SINGULAR = 4,
  SISCTL_ERR_INSUFFICIENT_DATA = 5,
  SISCTL_ERR_IO = 6,
  SISCTL_ERR_NULL_ARGUMENT = 7,
  SISCTL_ERR_BUFFER_TOO_SMALL = 8,
  SISCTL_ERR_INTERNAL = 9
} sisctl_status;

typedef enum sisctl_update_mode {
  SISCTL_MODE_AS_PRINTED = 0,
  SISCTL_MODE_EXACT_FOC = 1
} sisctl_update_mode;

typedef struct sisctl_model_params {
  double alpha;
  double beta;
  double gamma;
  double sigma;
  double delta;
} sisctl_model_params;

typedef struct sisctl_cost_params {
  double a0;
  double aI;
  double amS;
  double amI;
  double ar;
} sisctl_cost_params;

typedef struct sisctl_config sisctl_config;
typedef struct sisctl_solution sisctl_solution;

SISCTL_API const char* sisctl_version(void);
SISCTL_API const char* sisctl_last_error(void);
SISCTL_API const char* sisctl_status_string(sisctl_status status);

/* Fill with the built-in defaults. */
SISCTL_API void sisctl_model_params_default(sisctl_model_params* p);
SISCTL_API void sisctl_cost_params_default(sisctl_cost_params* k);

/* Configuration. `path` may be NULL for the defaults; overrides are
 * "key=value" strings applied in order. */
SISCTL_API sisctl_status sisctl_config_load(const char* path,
                                            const char* const* overrides,
                                            size_t n_overrides,
                                            sisctl_config** out);
SISCTL_API sisctl_status sisctl_config_default(sisctl_config** out);
SISCTL_API sisctl_status sisctl_config_set(sisctl_config* cfg,
                                           const char* assignment);
/* Writes the effective configuration as JSON. `needed` receives the size
 * including the terminating NUL; buf may be NULL to query it. */
SISCTL_API sisctl_status sisctl_config_to_json(const sisctl_config* cfg,
                                               char* buf, size_t capacity,
                                               size_t* needed);
SISCTL_API void sisctl_config_free(sisctl_config* cfg);

/* Runs a command ("solve", "evaluate", "benchmark", "suboptimal",
 * "perturb", "sweep", "validate"), printing progress to stdout and
 * diagnostics to stderr. Returns the process exit status: 0 success,
 * 1 error, 2 stopping rule not met. */
SISCTL_API int sisctl_dispatch(const char* command, const sisctl_config* cfg);

/* Policy improvement on the configured setup. */
SISCTL_API sisctl_status sisctl_solve(const sisctl_config* cfg,
                                      sisctl_solution** out);
SISCTL_API size_t sisctl_solution_size(const sisctl_solution* s);
SISCTL_API int sisctl_solution_converged(const sisctl_solution* s);
SISCTL_API size_t sisctl_solution_iterations(const sisctl_solution* s);
/* Copies up to `capacity` nodes into each non-NULL array. */
SISCTL_API sisctl_status sisctl_solution_fields(const sisctl_solution* s,
                                                double* x, double* v,
                                                double* eta, double* rho,
                                                size_t capacity);
/* Error norms e_1, e_2, ...; `needed` receives their count. */
SISCTL_API sisctl_status sisctl_solution_errors(const sisctl_solution* s,
                                                double* errors,
                                                size_t capacity,
                                                size_t* needed);
SISCTL_API void sisctl_solution_free(sisctl_solution* s);

/* Pointwise kernels. */
SISCTL_API sisctl_status sisctl_drift(double x, double eta, double rho,
                                      const sisctl_model_params* p,
                                      double* out);
SISCTL_API sisctl_status sisctl_diffusion(double x,
                                          const sisctl_model_params* p,
                                          double* out);
SISCTL_API sisctl_status sisctl_running_cost(double x, double eta, double rho,
                                             const sisctl_cost_params* k,
                                             double* out);
SISCTL_API sisctl_status sisctl_update_controls(
    double x, double dv, const sisctl_model_params* p,
    const sisctl_cost_params* k, sisctl_update_mode mode, double rho_max,
    double* eta, double* rho);

#ifdef __cplusplus
}
#endif

#endif /* SISCTL_SISCTL_H */
