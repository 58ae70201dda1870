/* spinn: sparse-input neural networks.
 *
 * Feedforward networks whose first-layer weight columns carry a sparse group
 * lasso penalty, trained by proximal gradient descent with a monotone line
 * search. The penalty produces bit-exact zero columns, so feature selection
 * is an exact test, not a threshold.
 *
 * All functions return SPINN_OK on success; on failure they return a status
 * code and leave a message retrievable through spinn_last_error() on the
 * calling thread. Objects returned through out-parameters are owned by the
 * caller and released with the matching *_free function. Strings returned
 * through char** out-parameters are released with spinn_string_free().
 *
 * Configuration is passed as JSON text; see the project README for the
 * schemas.
 */
#ifndef SPINN_SPINN_H
#define SPINN_SPINN_H

#include <stdint.h>

#if defined(_WIN32)
#define SPINN_API __declspec(dllexport)
#else
#define SPINN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spinn_status {
  SPINN_OK = 0,
  SPINN_ERR_ARGUMENT = 1, /* invalid input or configuration */
  SPINN_ERR_NUMERIC = 2,  /* non-finite values or failed optimization */
  SPINN_ERR_IO = 3,       /* file cannot be read or written */
  SPINN_ERR_FORMAT = 4    /* malformed file or JSON */
} spinn_status;

typedef enum spinn_task {
  SPINN_TASK_REGRESSION = 0,
  SPINN_TASK_CLASSIFICATION = 1
} spinn_task;

typedef struct spinn_dataset spinn_dataset;
typedef struct spinn_model spinn_model;

SPINN_API const char* spinn_version(void);

/* Message for the most recent failure on this thread. */
SPINN_API const char* spinn_last_error(void);

/* ---- datasets ---- */

/* features is row-major n_rows x n_features; responses has n_rows entries
 * and may be NULL for feature-only data (prediction input). */
SPINN_API spinn_status spinn_dataset_create(int64_t n_rows, int64_t n_features,
                                            const double* features,
                                            const double* responses,
                                            spinn_task task,
                                            spinn_dataset** out);

/* CSV with an optional auto-detected header. When has_response is nonzero
 * the last column is the response. */
SPINN_API spinn_status spinn_dataset_load_csv(const char* path, int has_response,
                                              spinn_task task,
                                              spinn_dataset** out);

SPINN_API spinn_status spinn_dataset_save_csv(const spinn_dataset* data,
                                              const char* path,
                                              int with_response);

SPINN_API spinn_status spinn_dataset_dims(const spinn_dataset* data,
                                          int64_t* n_rows, int64_t* n_features);

SPINN_API void spinn_dataset_free(spinn_dataset* data);

/* ---- training and cross-validation ---- */

/* Fits one model. config_json holds "architecture", "penalty" and "train"
 * sections; train.seed is required. out_metrics_json (optional) receives a
 * JSON document with the objective trace, selected features and the fully
 * resolved configuration. */
SPINN_API spinn_status spinn_train(const spinn_dataset* data,
                                   const char* config_json,
                                   spinn_model** out_model,
                                   char** out_metrics_json);

/* K-fold cross-validation over a hyperparameter grid followed by a refit on
 * the full data at the winning cell. config_json holds "k", "grid" and
 * "train" sections. */
SPINN_API spinn_status spinn_cross_validate(const spinn_dataset* data,
                                            const char* config_json,
                                            spinn_model** out_model,
                                            char** out_report_json);

/* ---- models ---- */

SPINN_API spinn_status spinn_model_save(const spinn_model* model,
                                        const char* path);

SPINN_API spinn_status spinn_model_load(const char* path, spinn_model** out);

SPINN_API spinn_status spinn_model_num_features(const spinn_model* model,
                                                int64_t* n_features);

/* One prediction per dataset row, written to out_predictions (length n).
 * Classification models emit probabilities strictly inside (0, 1). */
SPINN_API spinn_status spinn_model_predict(const spinn_model* model,
                                           const spinn_dataset* data,
                                           double* out_predictions);

/* Architecture, penalty, training metadata and selected features as JSON. */
SPINN_API spinn_status spinn_model_info_json(const spinn_model* model,
                                             char** out_json);

SPINN_API void spinn_model_free(spinn_model* model);

/* ---- simulation experiments ---- */

/* Draws synthetic train/test sets for one of the built-in scenarios.
 * scenario_json: {"scenario":"teacher|additive|complex|highdim", "p":...,
 * "n_train":..., "n_test":..., "snr":..., "seed":...}. out_meta_json
 * records the noise scale and the relevant feature set. */
SPINN_API spinn_status spinn_simulate(const char* scenario_json,
                                      spinn_dataset** out_train,
                                      spinn_dataset** out_test,
                                      char** out_meta_json);

/* Convergence-rate experiment along one axis ("n", "p" or "m1"); returns the
 * per-point table and fitted slopes as JSON. */
SPINN_API spinn_status spinn_rate_experiment(const char* config_json,
                                             char** out_result_json);

/* Slope summaries for an externally supplied table (regression-machinery
 * check without running any fits). mean_mass may be NULL. */
SPINN_API spinn_status spinn_rate_slopes_from_table(const char* axis,
                                                    const double* grid_values,
                                                    const double* mean_excess,
                                                    const double* mean_mass,
                                                    int64_t n_points,
                                                    char** out_result_json);

/* Lasso-weight vs group-lasso-weight sweep on the complex scenario. */
SPINN_API spinn_status spinn_alpha_sweep(const char* config_json,
                                         char** out_result_json);

SPINN_API void spinn_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* SPINN_SPINN_H */
