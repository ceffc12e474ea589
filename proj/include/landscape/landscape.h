/*
 * C interface to the landscape library: loss-landscape grids in Hessian
 * eigenvector subspaces, their 0-dimensional persistence, and the SMAD
 * smoothness metric.
 *
 * All objects are opaque handles released with the matching *_free call.
 * Every fallible call returns an ll_status; on failure ll_last_error() holds
 * a message for the calling thread. Strings returned through char** are
 * heap-allocated and released with ll_string_free.
 *
 * Options are passed as JSON object strings; NULL or "" means defaults.
 */
#ifndef LANDSCAPE_LANDSCAPE_H
#define LANDSCAPE_LANDSCAPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(LL_BUILDING_LIBRARY)
#define LL_API __attribute__((visibility("default")))
#else
#define LL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as CLI exit codes (usage errors exit with 2). */
typedef enum ll_status {
  LL_OK = 0,
  LL_ERR_INTERNAL = 1,
  LL_ERR_FORMAT = 2,
  LL_ERR_NUMERIC = 3,
  LL_ERR_USAGE = 4
} ll_status;

typedef struct ll_oracle ll_oracle;
typedef struct ll_spectrum ll_spectrum;
typedef struct ll_grid ll_grid;
typedef struct ll_analysis ll_analysis;

LL_API const char* ll_version(void);
LL_API const char* ll_last_error(void);
LL_API void ll_string_free(char* s);

/* Writes bytes to a temporary sibling and renames it over path. */
LL_API ll_status ll_write_file(const char* path, const char* data, size_t len);

/* ---- oracles ---------------------------------------------------------- */

/* name: see ll_builtin_names. params: {"dim", "seed", "basins", "spread",
 * "checkpoint", "dataset"} as applicable. */
LL_API ll_status ll_oracle_builtin(const char* name, const char* params_json, ll_oracle** out);
LL_API void ll_oracle_free(ll_oracle* oracle);
/* Comma-separated list of builtin names. */
LL_API ll_status ll_builtin_names(char** out);

LL_API size_t ll_oracle_dim(const ll_oracle* oracle);
LL_API ll_status ll_oracle_id(const ll_oracle* oracle, char** out);
/* Writes dim values. */
LL_API ll_status ll_oracle_default_origin(const ll_oracle* oracle, double* out, size_t len);
LL_API ll_status ll_oracle_value(const ll_oracle* oracle, const double* theta, size_t len, double* out);
LL_API ll_status ll_oracle_gradient(const ll_oracle* oracle, const double* theta, size_t len, double* out);
LL_API ll_status ll_oracle_hvp(const ll_oracle* oracle, const double* theta, const double* v, size_t len,
                               double* out);

/* Trains an MLP on a dataset and writes a checkpoint (flat float64 file plus
 * "<path>.json" sidecar embedding spec and dataset).
 * spec: {layer_widths, activation, loss}; dataset: {inputs, targets};
 * train: {epochs, lr, batch, weight_decay, seed}. */
LL_API ll_status ll_mlp_train(const char* spec_json, const char* dataset_json, const char* train_json,
                              const char* checkpoint_path);

/* ---- spectrum --------------------------------------------------------- */

/* theta may be NULL for the oracle's default origin.
 * config: {"k", "max_iter", "tol", "seed", "ordering": "magnitude"|"algebraic"} */
LL_API ll_status ll_spectrum_compute(const ll_oracle* oracle, const double* theta, size_t len,
                                     const char* config_json, ll_spectrum** out);
LL_API void ll_spectrum_free(ll_spectrum* spectrum);
LL_API size_t ll_spectrum_count(const ll_spectrum* spectrum);
LL_API ll_status ll_spectrum_eigenvalues(const ll_spectrum* spectrum, double* out, size_t len);
/* {eigenvalues, residuals, iterations, converged, degenerate, ordering, dim} */
LL_API ll_status ll_spectrum_to_json(const ll_spectrum* spectrum, char** out);
LL_API ll_status ll_spectrum_write_vectors(const ll_spectrum* spectrum, const char* path);
/* Hutchinson estimate; attached to the spectrum so reports can include it. */
LL_API ll_status ll_spectrum_trace(ll_spectrum* spectrum, const ll_oracle* oracle, const double* theta, size_t len,
                                   size_t samples, uint64_t seed, double* estimate, double* standard_error);

/* ---- grids ------------------------------------------------------------ */

/* Samples along the first n eigenvectors of `spectrum` around theta (NULL for
 * the oracle's default origin).
 * subspace: {"n", "range", "steps", "scaling": "uniform"|"inverse-eigenvalue", "threads"} */
LL_API ll_status ll_grid_sample(const ll_oracle* oracle, const double* theta, size_t len, const ll_spectrum* spectrum,
                                const char* subspace_json, ll_grid** out);
/* Row-major values, last axis fastest. */
LL_API ll_status ll_grid_from_values(const size_t* shape, size_t ndim, const double* values, size_t count,
                                     ll_grid** out);
/* Detects LLG binary, LLG JSON or CSV by content. */
LL_API ll_status ll_grid_read(const char* path, ll_grid** out);
/* format: "llg", "json" or "csv". Written atomically. */
LL_API ll_status ll_grid_write(const ll_grid* grid, const char* path, const char* format);
LL_API void ll_grid_free(ll_grid* grid);
LL_API size_t ll_grid_ndim(const ll_grid* grid);
LL_API size_t ll_grid_size(const ll_grid* grid);
LL_API ll_status ll_grid_shape(const ll_grid* grid, size_t* out, size_t len);
LL_API ll_status ll_grid_values(const ll_grid* grid, double* out, size_t len);

/* ---- analysis --------------------------------------------------------- */

/* options: {"adjacency": "axis"|"full", "simplify": tau} */
LL_API ll_status ll_analysis_run(const ll_grid* grid, const char* options_json, ll_analysis** out);
LL_API void ll_analysis_free(ll_analysis* analysis);
LL_API double ll_analysis_smad(const ll_analysis* analysis);
LL_API double ll_analysis_persistence_range(const ll_analysis* analysis);
LL_API size_t ll_analysis_pair_count(const ll_analysis* analysis);
LL_API size_t ll_analysis_minimum_count(const ll_analysis* analysis);
/* Stable-manifold assignment (minimum grid index per point), len = grid size. */
LL_API ll_status ll_analysis_manifolds(const ll_analysis* analysis, uint64_t* out, size_t len);
/* Landscape report JSON. spectrum may be NULL. */
LL_API ll_status ll_analysis_report(const ll_analysis* analysis, const ll_spectrum* spectrum, char** out);
/* Merge tree, barcode and manifolds as one JSON document. */
LL_API ll_status ll_analysis_topology_json(const ll_analysis* analysis, char** out);
/* kind: "barcode", "mergetree", "profile" or "contour".
 * options: {"levels"}; profile levels default 64, contour levels default 10. */
LL_API ll_status ll_analysis_render(const ll_analysis* analysis, const char* kind, const char* options_json,
                                    char** out);

#ifdef __cplusplus
}
#endif

#endif /* LANDSCAPE_LANDSCAPE_H */
