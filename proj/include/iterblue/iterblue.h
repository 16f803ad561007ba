/*
 * iterblue — parameter estimation from linear measurements with an uncertain
 * measurement matrix, via an iteratively reweighted BLUE.
 *
 * C API of the shared library. All objects are opaque handles created and
 * destroyed here; every fallible call returns an ib_status and leaves a
 * human-readable message in ib_last_error() (thread local) on failure.
 * Matrices are dense row-major double arrays owned by the caller.
 */
#ifndef ITERBLUE_ITERBLUE_H
#define ITERBLUE_ITERBLUE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IB_API __declspec(dllexport)
#elif defined(__GNUC__)
#define IB_API __attribute__((visibility("default")))
#else
#define IB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ib_status {
  IB_OK = 0,
  IB_ERR_INVALID_ARGUMENT = 1, /* null handle / bad buffer / unknown key */
  IB_ERR_DIMENSION = 2,        /* operand shapes do not conform */
  IB_ERR_CONTRACT = 3,         /* symmetry/definiteness/invariant violation */
  IB_ERR_RANK = 4,             /* rank-deficient least-squares system */
  IB_ERR_DIVERGENCE = 5,       /* iterates left the finite/bounded region */
  IB_ERR_PARSE = 6,            /* malformed config text */
  IB_ERR_IO = 7,               /* file/stream failure */
  IB_ERR_INTERNAL = 8
} ib_status;

typedef struct ib_config ib_config; /* parsed experiment configuration */
typedef struct ib_report ib_report; /* aggregated Monte Carlo MSE report */
typedef struct ib_trace ib_trace;   /* per-iteration estimate trace */

/* One aggregated report row. `estimator` stays valid until the report is
 * freed; `key` is the noise variance (sweep) or iteration index (converge). */
typedef struct ib_report_row {
  const char* estimator;
  double key;
  double mse;
  double mc_stderr;
  uint64_t trials;    /* trials entering the mean */
  uint64_t divergent; /* trials excluded as divergent */
} ib_report_row;

IB_API const char* ib_version(void);
/* Message of the most recent failure on this thread ("" if none). */
IB_API const char* ib_last_error(void);

/* -- configuration ------------------------------------------------------- */

/* Default experiment: 5-tap impulse response h ~ N(0, I), x = [1 0.5 0.25],
 * c_ee = diag(1e-4, 1e-5, 1e-6, 1e-6, 1e-6), 31-point noise grid 1e-8..1e-3,
 * 10 iterations, 10000 trials. */
IB_API ib_status ib_config_default(ib_config** out);
/* Parses the `key = value` config format (same as ib_config_default for the
 * empty string). */
IB_API ib_status ib_config_parse(const char* text, ib_config** out);
IB_API ib_status ib_config_load(const char* path, ib_config** out);
/* Overrides: keys "trials", "seed", "n_iter" (u64); "sigma_n_sq",
 * "stop_tol" (f64). */
IB_API ib_status ib_config_set_u64(ib_config* cfg, const char* key,
                                   uint64_t value);
IB_API ib_status ib_config_set_f64(ib_config* cfg, const char* key,
                                   double value);
/* Canonical serialized form; pointer owned by cfg, valid until the next
 * call on it. */
IB_API const char* ib_config_to_string(ib_config* cfg);
IB_API void ib_config_free(ib_config* cfg);

/* -- campaigns ----------------------------------------------------------- */

/* Average MSE of each configured estimator over the noise-variance grid.
 * threads <= 0 uses hardware concurrency; results are independent of the
 * thread count. */
IB_API ib_status ib_run_sweep(const ib_config* cfg, int threads,
                              ib_report** out);
/* Per-iteration average MSE at the config's sigma_n_sq. */
IB_API ib_status ib_run_converge(const ib_config* cfg, int threads,
                                 ib_report** out);
/* Draws the single scenario determined by the config's seed and sigma_n_sq
 * and runs the iterative estimator on it. */
IB_API ib_status ib_run_estimate(const ib_config* cfg, ib_trace** out);

/* -- reports ------------------------------------------------------------- */

IB_API size_t ib_report_rows(const ib_report* report);
IB_API ib_status ib_report_get_row(const ib_report* report, size_t index,
                               ib_report_row* out);
/* Divergent trials / attempted trials over the whole campaign. */
IB_API double ib_report_divergence_rate(const ib_report* report);
/* CSV with a `# key = value` comment block; path NULL writes to stdout.
 * deterministic != 0 omits the timestamp line. */
IB_API ib_status ib_report_write_csv(const ib_report* report, const char* path,
                                     int deterministic);
IB_API void ib_report_free(ib_report* report);

/* -- traces -------------------------------------------------------------- */

IB_API size_t ib_trace_len(const ib_trace* trace); /* iterations + 1 */
IB_API size_t ib_trace_dim(const ib_trace* trace);
IB_API int ib_trace_stopped_early(const ib_trace* trace);
IB_API ib_status ib_trace_get(const ib_trace* trace, size_t iteration,
                              double* out, size_t cap);
IB_API ib_status ib_trace_write_csv(const ib_trace* trace, const char* path,
                                    int deterministic);
IB_API void ib_trace_free(ib_trace* trace);

/* -- direct estimation on caller arrays ---------------------------------- */

/* Ordinary least squares: x minimizing |h x - y|, h is rows x cols. */
IB_API ib_status ib_ls(size_t rows, size_t cols, const double* h,
                       const double* y, double* x_out);
/* BLUE (h^T c^-1 h)^-1 h^T c^-1 y with noise covariance c (rows x rows). */
IB_API ib_status ib_blue(size_t rows, size_t cols, const double* h,
                         const double* c, const double* y, double* x_out);
/* Iteratively reweighted BLUE with independent entrywise error variances v
 * (rows x cols) on the estimated matrix h_hat. */
IB_API ib_status ib_iterative_unstructured(size_t rows, size_t cols,
                                           const double* y,
                                           const double* h_hat,
                                           const double* c_nn, const double* v,
                                           uint64_t n_iter, double stop_tol,
                                           ib_trace** out);
/* Iteratively reweighted BLUE for a convolution model: h_hat is the
 * estimated n_h-tap impulse response, c_ee its n_h x n_h error covariance,
 * y and c_nn have n_y = n_h + n_x - 1 rows. */
IB_API ib_status ib_iterative_convolution(size_t n_h, size_t n_x,
                                          const double* y,
                                          const double* h_hat,
                                          const double* c_nn,
                                          const double* c_ee, uint64_t n_iter,
                                          double stop_tol, ib_trace** out);

#ifdef __cplusplus
}
#endif

#endif /* ITERBLUE_ITERBLUE_H */
