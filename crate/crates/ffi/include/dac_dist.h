#ifndef DAC_DIST_H
#define DAC_DIST_H

/* Generated by cbindgen. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum {
  DAC_STATUS_OK = 0,
  DAC_STATUS_INVALID_ARGUMENT = 1,
  DAC_STATUS_NULL_POINTER = 2,
  DAC_STATUS_NOT_CONVERGED = 3,
  DAC_STATUS_DEGENERATE = 4,
  DAC_STATUS_UNSUPPORTED = 5,
  DAC_STATUS_BUFFER_TOO_SMALL = 6,
  DAC_STATUS_PANIC = 7,
} DacStatus;

typedef enum {
  DAC_SYMBOL_ZERO = 0,
  DAC_SYMBOL_AMBIGUOUS = 1,
  DAC_SYMBOL_ONE = 2,
} DacSymbol;

typedef enum {
  DAC_POLY_CASE_A1 = 0,
  DAC_POLY_CASE_A2 = 1,
  DAC_POLY_CASE_A3 = 2,
  DAC_POLY_CASE_A4 = 3,
  DAC_POLY_CASE_B = 4,
  DAC_POLY_CASE_RECURSIVE = 5,
} DacPolyCase;

typedef enum {
  DAC_METRIC_L1 = 0,
  DAC_METRIC_MSE = 1,
  DAC_METRIC_LINF = 2,
} DacMetric;

/**
 * Converged (or capped) solver grid together with its report.
 */
typedef struct DacDistribution DacDistribution;

typedef struct DacHistogram DacHistogram;

typedef struct DacPolyApprox DacPolyApprox;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *dac_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length in
 * bytes, excluding the terminator.
 */
size_t dac_last_error_message(char *buf, size_t len);

DacStatus dac_encode(const uint8_t *bits, size_t len, double q, double *low, double *width);

DacStatus dac_codeword_value(double low, double width, double *out);

DacStatus dac_classify(double u, double q, DacSymbol *out);

/**
 * M-algorithm decode of `len` symbols. `out_bits` receives `len` bytes
 * (0 or 1); `out_metric` the Hamming distance to `side_info`.
 */
DacStatus dac_decode(double u,
                     double q,
                     const uint8_t *side_info,
                     size_t len,
                     size_t m,
                     uint8_t *out_bits,
                     size_t *out_metric);

/**
 * Runs the grid solver. On `Ok` or `NotConverged`, `*out` receives a
 * handle to free with [`dac_distribution_free`].
 */
DacStatus dac_solve(double q, size_t cells, double delta, size_t max_iters, DacDistribution **out);

/**
 * Number of grid values, `N + 1`.
 */
size_t dac_distribution_len(const DacDistribution *dist);

DacStatus dac_distribution_values(const DacDistribution *dist, double *buf, size_t len);

size_t dac_distribution_iterations(const DacDistribution *dist);

double dac_distribution_final_mse(const DacDistribution *dist);

void dac_distribution_free(DacDistribution *dist);

DacStatus dac_closed_form_sqrt2(double u, double *out);

DacStatus dac_poly_new(double q, DacPolyApprox **out);

/**
 * Evaluates on `[0, 1]` (the right half by symmetry).
 */
DacStatus dac_poly_eval(const DacPolyApprox *approx, double u, double *out);

double dac_poly_lambda(const DacPolyApprox *approx);

double dac_poly_c(const DacPolyApprox *approx);

DacStatus dac_poly_case(const DacPolyApprox *approx, DacPolyCase *out);

void dac_poly_free(DacPolyApprox *approx);

DacStatus dac_gaussian_sigma2(double q, double *out);

DacStatus dac_gaussian_eval(double sigma2, double u, double *out);

/**
 * Monte Carlo histogram; `seq_len = 0` picks the length from `q`.
 */
DacStatus dac_sample_histogram(double q,
                               uint64_t samples,
                               size_t bins,
                               uint64_t seed,
                               size_t seq_len,
                               DacHistogram **out);

size_t dac_histogram_bins(const DacHistogram *hist);

DacStatus dac_histogram_density(const DacHistogram *hist, double *buf, size_t len);

DacStatus dac_histogram_counts(const DacHistogram *hist, uint64_t *buf, size_t len);

void dac_histogram_free(DacHistogram *hist);

DacStatus dac_distance(const double *a, const double *b, size_t len, DacMetric metric, double *out);

/**
 * Human-readable name of a status code, as a static string.
 */
const char *dac_status_name(DacStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DAC_DIST_H */
