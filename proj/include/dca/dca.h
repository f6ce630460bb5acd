/* C interface to the differential connectivity library. All functions are
 * thread safe on distinct handles. Every call returns a dca_status; on
 * failure dca_last_error() describes the problem for the calling thread. */
#ifndef DCA_DCA_H
#define DCA_DCA_H

#include <stddef.h>
#include <stdint.h>

#if defined(DCA_BUILDING_LIBRARY)
#define DCA_API __attribute__((visibility("default")))
#else
#define DCA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dca_status {
  DCA_OK = 0,
  DCA_ERR_INVALID_ARGUMENT = 1,
  DCA_ERR_PARSE = 2,
  DCA_ERR_IO = 3,
  DCA_ERR_NOT_POSITIVE_DEFINITE = 4,
  DCA_ERR_RANK_DEFICIENT = 5,
  DCA_ERR_INSUFFICIENT_SAMPLES = 6,
  DCA_ERR_NOT_CONVERGED = 7,
  DCA_ERR_NUMERICAL = 8,
  DCA_ERR_INTERNAL = 9
} dca_status;

typedef struct dca_dataset dca_dataset;
typedef struct dca_result dca_result;

DCA_API const char* dca_version(void);
DCA_API const char* dca_status_string(dca_status status);
/* Message of the last failed call on this thread; "" after a success. */
DCA_API const char* dca_last_error(void);
/* 1 when the status reflects bad input or configuration, 0 for numerical
 * failures. */
DCA_API int dca_status_is_input_error(dca_status status);

/* Datasets: rows are samples, columns variables. */
DCA_API dca_status dca_dataset_read_csv(const char* path, int has_header, int standardize, dca_dataset** out);
DCA_API dca_status dca_dataset_from_values(const double* row_major, size_t rows, size_t cols, dca_dataset** out);
DCA_API size_t dca_dataset_rows(const dca_dataset* d);
DCA_API size_t dca_dataset_cols(const dca_dataset* d);
/* Column name or NULL when the file had no header. */
DCA_API const char* dca_dataset_name(const dca_dataset* d, size_t column);
/* Zero-variance columns; *count receives their number. */
DCA_API const int* dca_dataset_zero_variance(const dca_dataset* d, size_t* count);
DCA_API void dca_dataset_free(dca_dataset* d);

/* Results carry a JSON document and, for simulations, a metrics CSV. */
DCA_API const char* dca_result_json(const dca_result* r);
DCA_API const char* dca_result_csv(const dca_result* r);
DCA_API void dca_result_free(dca_result* r);

/* Differential connectivity test. config_json holds the fields alpha, mode,
 * test, edge_rule, folds, lambda, perms, seed, grid_size, grid_ratio (all
 * optional) plus threads. */
DCA_API dca_status dca_test(const dca_dataset* x1, const dca_dataset* x2, const char* config_json, dca_result** out);
/* Quantitative permutation test over all nodes. config_json: perms, alpha,
 * seed, threads. */
DCA_API dca_status dca_quant(const dca_dataset* x1, const dca_dataset* x2, const char* config_json, dca_result** out);
/* Condition diagnostics for a covariance matrix given as a headerless
 * dataset. config_json: node, lambda, n (optional), re_support (optional
 * array). */
DCA_API dca_status dca_check(const dca_dataset* sigma, const char* config_json, dca_result** out);
/* Simulation study. config_json overrides the desk defaults (or the full
 * scale defaults when full_scale != 0). */
DCA_API dca_status dca_simulate(const char* config_json, int full_scale, dca_result** out);
/* Resolved simulation configuration as JSON. */
DCA_API dca_status dca_default_sim_config(const char* config_json, int full_scale, dca_result** out);
/* Graph pair of one repetition: JSON {"g1": edge list text, "g2": ...}. */
DCA_API dca_status dca_simulation_graphs(const char* config_json, int full_scale, int rep, dca_result** out);

#ifdef __cplusplus
}
#endif

#endif
