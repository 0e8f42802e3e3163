/* psirmon: process monitoring with supervised X-space decompositions.
 *
 * C interface to the psirmon shared library. All functions return a
 * psirmon_status; out-parameters are written only on PSIRMON_OK. Handles are
 * opaque and must be released with the matching _destroy function. Error
 * details for the calling thread are available via psirmon_last_error().
 */
#ifndef PSIRMON_H
#define PSIRMON_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psirmon_status {
    PSIRMON_OK = 0,
    PSIRMON_ERR_INVALID_ARGUMENT = 1, /* bad parameter, shape or domain violation */
    PSIRMON_ERR_NUMERIC = 2,          /* degenerate data or failed computation */
    PSIRMON_ERR_IO = 3,               /* file could not be opened, read or written */
    PSIRMON_ERR_PARSE = 4             /* malformed CSV, config or model document */
} psirmon_status;

typedef enum psirmon_method {
    PSIRMON_METHOD_PLS = 0,
    PSIRMON_METHOD_SIR = 1,
    PSIRMON_METHOD_PSIR = 2
} psirmon_method;

/* Library version as "major.minor.patch". Static storage, do not free. */
const char *psirmon_version(void);

/* Short name for a status code, e.g. "invalid_argument". */
const char *psirmon_status_name(psirmon_status status);

/* Message describing the most recent failure on the calling thread.
 * Empty string if no failure has occurred. Static thread-local storage. */
const char *psirmon_last_error(void);

/* ------------------------------------------------------------------ */
/* Datasets                                                            */

typedef struct psirmon_dataset psirmon_dataset;

/* Wrap an n x p predictor matrix (row-major) and an optional response
 * vector of length n (pass NULL for predictor-only data). Data is copied. */
psirmon_status psirmon_dataset_create(const double *x, const double *y,
                                      int32_t n, int32_t p,
                                      psirmon_dataset **out);

/* Read a comma-delimited file with a header row. If response_column is a
 * column name, that column becomes the response and the remaining numeric
 * columns the predictors; if NULL, all columns are predictors. */
psirmon_status psirmon_dataset_read_csv(const char *path,
                                        const char *response_column,
                                        psirmon_dataset **out);

psirmon_status psirmon_dataset_dims(const psirmon_dataset *data,
                                    int32_t *n, int32_t *p);

/* True in *out when the dataset carries a response vector. */
psirmon_status psirmon_dataset_has_response(const psirmon_dataset *data,
                                            int32_t *out);

/* Copy the predictors out row-major; buffer must hold n * p doubles. */
psirmon_status psirmon_dataset_values(const psirmon_dataset *data,
                                      double *out);

void psirmon_dataset_destroy(psirmon_dataset *data);

/* ------------------------------------------------------------------ */
/* Monitors                                                            */

typedef struct psirmon_monitor psirmon_monitor;

typedef struct psirmon_fit_options {
    int32_t n_slices;       /* response slices for SIR/PSIR, default 10 */
    double alpha_threshold; /* eigenvalue-ratio threshold, default 1.5 */
    double alpha_sig;       /* control-limit significance, default 0.01 */
} psirmon_fit_options;

/* Fill options with the defaults above. */
psirmon_status psirmon_fit_options_init(psirmon_fit_options *opts);

/* Fit a monitor on a dataset that has a response. opts may be NULL for
 * defaults. The monitor holds the unit loading direction, score variance,
 * residual spectrum summaries and the three control limits. */
psirmon_status psirmon_monitor_fit(const psirmon_dataset *data,
                                   psirmon_method method,
                                   const psirmon_fit_options *opts,
                                   psirmon_monitor **out);

/* Persist / restore a monitor as a flat key-value text document. The
 * round-trip is bit-faithful for every stored real. */
psirmon_status psirmon_monitor_save(const psirmon_monitor *monitor,
                                    const char *path);
psirmon_status psirmon_monitor_load(const char *path, psirmon_monitor **out);

void psirmon_monitor_destroy(psirmon_monitor *monitor);

psirmon_status psirmon_monitor_method(const psirmon_monitor *monitor,
                                      psirmon_method *out);

/* p: predictor dimension, r: score dimension, n_train: training rows,
 * q: order of the projection subspace selected during fitting.
 * Any out-pointer may be NULL. */
psirmon_status psirmon_monitor_dims(const psirmon_monitor *monitor,
                                    int32_t *p, int32_t *r,
                                    int32_t *n_train, int32_t *q);

/* Unit loading direction; buffer must hold p doubles. */
psirmon_status psirmon_monitor_beta(const psirmon_monitor *monitor,
                                    double *out);

/* Training mean used to center incoming samples; buffer of p doubles. */
psirmon_status psirmon_monitor_mean(const psirmon_monitor *monitor,
                                    double *out);

/* Control limits for the score statistic, residual statistic and the
 * combined index. Any out-pointer may be NULL. */
psirmon_status psirmon_monitor_limits(const psirmon_monitor *monitor,
                                      double *t2_limit, double *spe_limit,
                                      double *phi_limit);

/* Spectral sums of the residual covariance. Any out-pointer may be NULL. */
psirmon_status psirmon_monitor_thetas(const psirmon_monitor *monitor,
                                      double *theta1, double *theta2,
                                      double *theta3);

psirmon_status psirmon_monitor_alpha_sig(const psirmon_monitor *monitor,
                                         double *out);

typedef struct psirmon_verdict {
    double t2;  /* score-space statistic */
    double spe; /* squared residual norm */
    double phi; /* combined index */
    int32_t t2_alarm;
    int32_t spe_alarm;
    int32_t phi_alarm;
} psirmon_verdict;

/* Score one p-vector against the monitor's limits. */
psirmon_status psirmon_monitor_score(const psirmon_monitor *monitor,
                                     const double *x, psirmon_verdict *out);

/* Score n row-major p-vectors; out must hold n verdicts. n = 0 is a
 * valid no-op. */
psirmon_status psirmon_monitor_detect(const psirmon_monitor *monitor,
                                      const double *x, int32_t n,
                                      psirmon_verdict *out);

/* ------------------------------------------------------------------ */
/* Control limits and quantiles                                        */

/* F-based limit for the score statistic at n training rows and score
 * dimension r. For r = 1 this equals the squared Student-t quantile. */
psirmon_status psirmon_t2_limit(int32_t n, int32_t r, double alpha_sig,
                                double *out);

/* Box gchi^2(h) approximation from the first two residual spectral sums. */
psirmon_status psirmon_spe_limit_box(double theta1, double theta2,
                                     double alpha_sig, double *out);

/* Normal-approximation alternative using the first three spectral sums. */
psirmon_status psirmon_spe_limit_jm(double theta1, double theta2,
                                    double theta3, double alpha_sig,
                                    double *out);

/* Moment-matched gchi^2 limit for the combined index given the two
 * component limits and the residual spectral sums. */
psirmon_status psirmon_combined_limit(double t2_limit, double spe_limit,
                                      double theta1, double theta2,
                                      double alpha_sig, double *out);

/* Inverse CDF. family is one of "normal", "chi_square", "student_t", "f";
 * df2 is ignored except for the F family. Non-integer degrees of freedom
 * are supported. */
psirmon_status psirmon_quantile(const char *family, double prob,
                                double df1, double df2, double *out);

/* ------------------------------------------------------------------ */
/* Monte Carlo experiments                                             */

typedef struct psirmon_experiment psirmon_experiment;
typedef struct psirmon_rate_table psirmon_rate_table;

/* New experiment configuration with the reference defaults: p=10, rho=0.5,
 * n_train=500, n_faulty=100, magnitudes 0,1,2,3,5,8,12, 100 directions,
 * 10 reps, linear model, noise_fraction=0.05, H=10, alpha_threshold=1.5,
 * alpha_sig=0.01, seed=0. */
psirmon_status psirmon_experiment_create(psirmon_experiment **out);

/* Set one field by config-file key: p, rho, n_train, n_faulty,
 * fault_magnitudes (comma-separated), n_directions, n_reps, model
 * (linear|nonlinear), noise_fraction, n_slices, alpha_threshold,
 * alpha_sig, seed. */
psirmon_status psirmon_experiment_set(psirmon_experiment *config,
                                      const char *key, const char *value);

/* Load keys from a flat "key = value" file with # comments. */
psirmon_status psirmon_experiment_load_file(psirmon_experiment *config,
                                            const char *path);

void psirmon_experiment_destroy(psirmon_experiment *config);

/* Run the experiment on the given number of worker threads (0 picks the
 * hardware count). The result is identical for any thread count. */
psirmon_status psirmon_experiment_run(const psirmon_experiment *config,
                                      int32_t threads,
                                      psirmon_rate_table **out);

/* Rows are (fault magnitude) x (method); n_rows = magnitudes x 3. */
psirmon_status psirmon_rate_table_rows(const psirmon_rate_table *table,
                                       int32_t *n_rows);

/* Row accessor; method receives a psirmon_method value. Any out-pointer
 * may be NULL. n_cells is the number of (direction, rep) cells aggregated;
 * cells whose fit failed are excluded and counted separately. */
psirmon_status psirmon_rate_table_row(const psirmon_rate_table *table,
                                      int32_t index, double *fault_magnitude,
                                      int32_t *method, double *mean_pct,
                                      double *std_pct, int32_t *n_cells);

psirmon_status psirmon_rate_table_failed_cells(const psirmon_rate_table *table,
                                               int32_t *out);

/* Render the table as CSV (header f,method,mean_pct,std_pct,n_cells) or as
 * an aligned human-readable table. Writes at most cap bytes including the
 * terminator and stores the full required size in *needed; call with
 * buf = NULL, cap = 0 to size the buffer. */
psirmon_status psirmon_rate_table_format(const psirmon_rate_table *table,
                                         int32_t as_csv, char *buf,
                                         size_t cap, size_t *needed);

void psirmon_rate_table_destroy(psirmon_rate_table *table);

#ifdef __cplusplus
}
#endif

#endif /* PSIRMON_H */
