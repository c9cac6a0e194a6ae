/*
 * parpmon C API.
 *
 * Every function returns a parpmon_status; on failure a human-readable
 * message for the calling thread is available from parpmon_last_error().
 * Objects are opaque handles created by *_create/*_load/*_fit and released
 * with the matching *_free. Strings returned through char** are released with
 * parpmon_string_free.
 */
#ifndef PARPMON_H
#define PARPMON_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PARPMON_BUILDING)
#    define PARPMON_API __declspec(dllexport)
#  else
#    define PARPMON_API __declspec(dllimport)
#  endif
#else
#  define PARPMON_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum parpmon_status {
  PARPMON_OK = 0,
  PARPMON_ERR_INVALID_ARGUMENT = 1,
  PARPMON_ERR_INSUFFICIENT_DATA = 2,
  PARPMON_ERR_DEGENERATE_MONTH = 3,
  PARPMON_ERR_SINGULAR_SYSTEM = 4,
  PARPMON_ERR_POSITIVITY = 5,
  PARPMON_ERR_PARSE = 6,
  PARPMON_ERR_GAP = 7,
  PARPMON_ERR_VALIDATION = 8,
  PARPMON_ERR_CONFIG = 9,
  PARPMON_ERR_IO = 10,
  PARPMON_ERR_INTERNAL = 11
} parpmon_status;

typedef enum parpmon_model_kind {
  PARPMON_MODEL_PARP = 0,
  PARPMON_MODEL_PARPA = 1
} parpmon_model_kind;

typedef enum parpmon_method {
  PARPMON_METHOD_YULE_WALKER = 0,
  PARPMON_METHOD_LEAST_SQUARES = 1
} parpmon_method;

typedef struct parpmon_series parpmon_series;
typedef struct parpmon_model parpmon_model;
typedef struct parpmon_panel parpmon_panel;
typedef struct parpmon_config parpmon_config;

PARPMON_API const char* parpmon_version(void);
PARPMON_API const char* parpmon_last_error(void);
PARPMON_API const char* parpmon_status_name(parpmon_status status);
/* Nonzero for statuses caused by bad input (arguments, files, config). */
PARPMON_API int parpmon_status_is_validation(parpmon_status status);
PARPMON_API void parpmon_string_free(char* text);

/* ---- series ------------------------------------------------------------ */

PARPMON_API parpmon_status parpmon_series_create(int start_year, int start_month, const double* values,
                                                 size_t count, const char* label, parpmon_series** out);
/* `subsystem` may be NULL. Column names default to date,value,subsystem. */
PARPMON_API parpmon_status parpmon_series_load_csv(const char* path, const char* subsystem,
                                                   parpmon_series** out);
PARPMON_API void parpmon_series_free(parpmon_series* series);
PARPMON_API size_t parpmon_series_length(const parpmon_series* series);
PARPMON_API parpmon_status parpmon_series_start(const parpmon_series* series, int* year, int* month);
PARPMON_API parpmon_status parpmon_series_values(const parpmon_series* series, double* out, size_t capacity);

/* ---- estimation -------------------------------------------------------- */

typedef struct parpmon_fit_options {
  parpmon_model_kind kind;
  parpmon_method method;
  int p_max;
} parpmon_fit_options;

PARPMON_API void parpmon_fit_options_default(parpmon_fit_options* options);
/* Selects per-month orders (PACF rule, up to p_max) and estimates the model. */
PARPMON_API parpmon_status parpmon_model_fit(const parpmon_series* series, const parpmon_fit_options* options,
                                             parpmon_model** out);
PARPMON_API void parpmon_model_free(parpmon_model* model);
PARPMON_API parpmon_model_kind parpmon_model_get_kind(const parpmon_model* model);
/* month is 1..12. `phi` receives `order` coefficients; capacity must be >= order. */
PARPMON_API parpmon_status parpmon_model_month(const parpmon_model* model, int month, int* order, double* phi,
                                               size_t capacity, double* psi, double* resid_std);
PARPMON_API parpmon_status parpmon_model_to_json(const parpmon_model* model, char** out);
/* Zero-noise recursion, `out` must hold `horizon` values. */
PARPMON_API parpmon_status parpmon_point_forecast(const parpmon_model* model, const parpmon_series* history,
                                                  int horizon, double* out);

/* ---- simulation -------------------------------------------------------- */

typedef struct parpmon_simulation_options {
  int horizon;
  int omega_count;
  uint64_t seed;
  int threads;
} parpmon_simulation_options;

PARPMON_API void parpmon_simulation_options_default(parpmon_simulation_options* options);
/* Joint simulation of `count` subsystems. Cross-subsystem correlation is
   estimated from the models' in-sample residuals. Histories must share their
   last month. */
PARPMON_API parpmon_status parpmon_simulate(const parpmon_model* const* models,
                                            const parpmon_series* const* histories, size_t count,
                                            const parpmon_simulation_options* options, parpmon_panel** out);
PARPMON_API void parpmon_panel_free(parpmon_panel* panel);
PARPMON_API parpmon_status parpmon_panel_dims(const parpmon_panel* panel, int* omega_count, int* horizon,
                                              int* subsystems);
/* k is 1-based. */
PARPMON_API parpmon_status parpmon_panel_value(const parpmon_panel* panel, int omega, int k, int subsystem,
                                               double* value);
PARPMON_API parpmon_status parpmon_panel_mean(const parpmon_panel* panel, int subsystem, double* out,
                                              size_t capacity);
/* Long format omega,k,subsystem,value. */
PARPMON_API parpmon_status parpmon_panel_write_csv(const parpmon_panel* panel, const char* path);

/* ---- backtest runs ----------------------------------------------------- */

PARPMON_API parpmon_status parpmon_config_create(parpmon_config** out);
PARPMON_API parpmon_status parpmon_config_load(const char* path, parpmon_config** out);
PARPMON_API void parpmon_config_free(parpmon_config* config);
PARPMON_API parpmon_status parpmon_config_set(parpmon_config* config, const char* key, const char* value);
/* Canonical `key = value` dump of the configuration. */
PARPMON_API parpmon_status parpmon_config_dump(const parpmon_config* config, char** out);
PARPMON_API parpmon_status parpmon_config_validate(const parpmon_config* config);
PARPMON_API parpmon_status parpmon_run_backtest(const parpmon_config* config);
PARPMON_API parpmon_status parpmon_render_reports(const char* output_dir, int with_published_reference);

#ifdef __cplusplus
}
#endif

#endif /* PARPMON_H */
