/* C interface of the fractional Allen-Cahn toolkit.
 *
 * Every call returns a status; on failure fracac_last_error() holds a message
 * for the calling thread. Strings returned through char** are heap allocated
 * and must be released with fracac_string_free. Handles are opaque. */
#ifndef FRACAC_H
#define FRACAC_H

#include <stddef.h>

#if defined(_WIN32)
#define FRACAC_API __declspec(dllexport)
#else
#define FRACAC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fracac_status {
  FRACAC_OK = 0,
  FRACAC_E_DOMAIN = 1,
  FRACAC_E_CONFIG = 2,
  FRACAC_E_SHAPE = 3,
  FRACAC_E_BLOWUP = 4,
  FRACAC_E_CONVERGENCE = 5,
  FRACAC_E_SINGULAR = 6,
  FRACAC_E_IO = 7,
  FRACAC_E_WINDOW = 8,
  FRACAC_E_INTERNAL = 9,
  FRACAC_E_ARGUMENT = 10 /* null handle or pointer */
} fracac_status;

FRACAC_API const char* fracac_version(void);
FRACAC_API const char* fracac_last_error(void);
FRACAC_API const char* fracac_status_name(fracac_status s);
FRACAC_API void fracac_string_free(char* s);

/* ---- closed-form constants */

typedef struct fracac_constants {
  double alpha;
  double norm_factor;
  double c_alpha;
  double d_alpha;
  double tail_p;
  int fractional_available; /* 0 at alpha = 2: the fractional constants are NaN */
} fracac_constants;

FRACAC_API fracac_status fracac_alpha_constants(double alpha, fracac_constants* out);

/* Two-interface collision time; pde_time != 0 includes the eps^{-(1+alpha)} factor. */
FRACAC_API fracac_status fracac_closed_form_tc(double d0, double alpha, double gamma, double eps, int pde_time,
                                               double* out);

/* ---- layer solution */

typedef struct fracac_layer fracac_layer;

typedef struct fracac_layer_info {
  double alpha;
  double L;
  size_t n;
  double gamma;
  double seminorm_sq;
  double interior_seminorm;
  double tail_term;
  double tail_p;
  double settle_time;
  long steps;
  double stationarity_residual;
  double tail_residual; /* NaN when not applicable */
} fracac_layer_info;

/* dt <= 0 or tol <= 0 select the defaults (0.05, 1e-10). */
FRACAC_API fracac_status fracac_layer_compute(double alpha, double L, size_t n, double dt, double tol,
                                              fracac_layer** out);
FRACAC_API fracac_status fracac_layer_info_get(const fracac_layer* layer, fracac_layer_info* out);
/* Copies nodes and values; n must equal the layer size. */
FRACAC_API fracac_status fracac_layer_profile(const fracac_layer* layer, double* x, double* v, size_t n);
/* Profile on the real line (constant -1 / +1 outside the domain). */
FRACAC_API fracac_status fracac_layer_eval(const fracac_layer* layer, double s, double* out);
/* Writes layer_<alpha>.csv (x, v) into dir and returns the summary record as JSON. */
FRACAC_API fracac_status fracac_layer_write(const fracac_layer* layer, const char* dir, char** summary_json);
FRACAC_API void fracac_layer_destroy(fracac_layer* layer);

/* ---- reduced interface ODE */

typedef struct fracac_ode_result {
  int collided;
  double t_collision;
  int colliding_index;
  double min_gap;
  long accepted_steps;
  double closed_form_tc; /* two-interface prediction, NaN for other counts */
} fracac_ode_result;

FRACAC_API fracac_status fracac_ode_collision(const double* centers, size_t n, double eps, double alpha,
                                              double gamma, double t_max, fracac_ode_result* out);
/* Same run, writing ode_trajectory.csv (t, x_1 ... x_n) into dir. */
FRACAC_API fracac_status fracac_ode_write(const double* centers, size_t n, double eps, double alpha, double gamma,
                                          double t_max, const char* dir, char** summary_json);

/* ---- experiment configuration */

typedef struct fracac_config fracac_config;

/* Newline separated preset names. */
FRACAC_API fracac_status fracac_presets(char** names);
/* preset NULL or "custom" gives the defaults. */
FRACAC_API fracac_status fracac_config_create(const char* preset, fracac_config** out);
FRACAC_API fracac_status fracac_config_from_json(const char* json, fracac_config** out);
FRACAC_API fracac_status fracac_config_set(fracac_config* cfg, const char* key, const char* value);
FRACAC_API fracac_status fracac_config_json(const fracac_config* cfg, char** out);
FRACAC_API fracac_status fracac_config_hash(const fracac_config* cfg, char** out);
FRACAC_API void fracac_config_destroy(fracac_config* cfg);

/* ---- experiments; outputs go to the config's output_dir */

typedef void (*fracac_progress_fn)(const char* message, void* user);

/* First (eps, alpha) cell of the config with the first method. snapshot_stride > 0
 * streams (t, x, u) rows every that many steps into snapshots.csv. */
FRACAC_API fracac_status fracac_simulate(const fracac_config* cfg, long snapshot_stride, fracac_progress_fn progress,
                                         void* user, char** summary_json);
FRACAC_API fracac_status fracac_sweep(const fracac_config* cfg, fracac_progress_fn progress, void* user,
                                      char** summary_json);
FRACAC_API fracac_status fracac_compare(const fracac_config* cfg, fracac_progress_fn progress, void* user,
                                        char** summary_json);
/* Width-law fit of a measurement CSV; writes JSON to out_path when non-NULL. */
FRACAC_API fracac_status fracac_fit_csv(const char* csv_path, const char* out_path, char** summary_json);
/* SVG figure analogues of a measurement CSV. */
FRACAC_API fracac_status fracac_plot_csv(const char* csv_path, const char* out_dir, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif
