/* fracest: estimation of fractional derivatives of reliability functions.
 *
 * Plain C interface over the C++ core. Every handle is opaque and owned by
 * the caller once returned; release it with the matching *_free function.
 * Strings returned through `const char**` stay valid until the owning handle
 * is freed. On failure, fracest_last_error() describes the most recent error
 * on the calling thread.
 */
#ifndef FRACEST_FRACEST_H
#define FRACEST_FRACEST_H

#include <stddef.h>
#include <stdint.h>

#if defined(FRACEST_BUILDING_LIBRARY)
#define FRACEST_API __attribute__((visibility("default")))
#else
#define FRACEST_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fracest_status {
  FRACEST_OK = 0,
  FRACEST_E_INVALID = 1,   /* bad argument, malformed input file */
  FRACEST_E_REGIME = 2,    /* order outside the estimation regime, q >= 1/alpha */
  FRACEST_E_NUMERICAL = 3, /* quadrature, factorization or convergence failure */
  FRACEST_E_IO = 4,
  FRACEST_E_INTERNAL = 5
} fracest_status;

typedef struct fracest_sample fracest_sample; /* one or two columns */
typedef struct fracest_report fracest_report; /* keyed scalars, series, strings, flags */
typedef struct fracest_curve fracest_curve;   /* tabulated function */
typedef struct fracest_vector fracest_vector; /* plain array of doubles */

FRACEST_API const char* fracest_version(void);
FRACEST_API const char* fracest_last_error(void);

/* FRACEST_E_INVALID outside (0, 1), FRACEST_E_REGIME for alpha >= 1/2. */
FRACEST_API fracest_status fracest_check_estimation_order(double alpha);

/* ---- samples ---- */
FRACEST_API fracest_status fracest_sample_load(const char* path, fracest_sample** out);
FRACEST_API fracest_status fracest_sample_from_values(const double* values, size_t n, fracest_sample** out);
FRACEST_API fracest_status fracest_sample_from_pairs(const double* xs, const double* ys, size_t n,
                                                     fracest_sample** out);
/* columns is 1 or 2. */
FRACEST_API fracest_status fracest_sample_shape(const fracest_sample* s, size_t* n, int* columns);
FRACEST_API void fracest_sample_free(fracest_sample* s);

/* ---- estimators (each returns a report) ---- */
/* Scalars estimate, stderr, variance, n, alpha, x, level; series ci. */
FRACEST_API fracest_status fracest_point(const fracest_sample* s, double alpha, double x, double level,
                                         fracest_report** out);
/* Scalar estimate; with grid > 0 also series field (row-major), xs, ys on (k / grid). */
FRACEST_API fracest_status fracest_mixed(const fracest_sample* s, double alpha, double beta, double x, double y,
                                         size_t grid, fracest_report** out);
/* Registered experiment; `config` is key=value text (may be NULL). */
FRACEST_API fracest_status fracest_experiment(const char* name, const char* config, uint64_t seed,
                                              unsigned workers, fracest_report** out);
/* Newline-separated experiment names; static storage. */
FRACEST_API const char* fracest_experiment_names(void);
FRACEST_API fracest_status fracest_selftest(fracest_report** out);

/* ---- spectral series ---- */
FRACEST_API fracest_status fracest_series_generate(const char* model, size_t n, uint64_t seed,
                                                   fracest_vector** out);
/* One value per line, `#` comments; negative values allowed. */
FRACEST_API fracest_status fracest_series_load(const char* path, fracest_vector** out);
FRACEST_API fracest_status fracest_series_save(const fracest_vector* v, const char* path);
/* Series lambda, estimate_curve on k * lambda_max / points. */
FRACEST_API fracest_status fracest_spectral_estimate(const fracest_vector* series, double alpha, size_t points,
                                                     double lambda_max, fracest_report** out);
FRACEST_API size_t fracest_vector_size(const fracest_vector* v);
FRACEST_API const double* fracest_vector_data(const fracest_vector* v);
FRACEST_API void fracest_vector_free(fracest_vector* v);

/* ---- reports ---- */
FRACEST_API fracest_status fracest_report_json(const fracest_report* r, const char** text);
FRACEST_API fracest_status fracest_report_csv(const fracest_report* r, const char** text);
FRACEST_API fracest_status fracest_report_scalar(const fracest_report* r, const char* key, double* value);
FRACEST_API fracest_status fracest_report_flag(const fracest_report* r, const char* key, int* value);
FRACEST_API void fracest_report_free(fracest_report* r);

/* ---- curves ---- */
/* Estimated D^alpha G_n on `points` graded intervals of [0, b]. */
FRACEST_API fracest_status fracest_curve_estimate(const fracest_sample* s, double alpha, size_t points, double b,
                                                  fracest_curve** out);
/* Numerical D^alpha of a closed-form law's reliability ("uniform", "power:D:C", ...). */
FRACEST_API fracest_status fracest_curve_law(const char* law, double alpha, size_t points, double b,
                                             fracest_curve** out);
FRACEST_API fracest_status fracest_curve_load(const char* path, fracest_curve** out);
FRACEST_API fracest_status fracest_curve_csv(const fracest_curve* c, const char** text);
FRACEST_API size_t fracest_curve_size(const fracest_curve* c);
FRACEST_API const double* fracest_curve_nodes(const fracest_curve* c);
FRACEST_API const double* fracest_curve_values(const fracest_curve* c);
FRACEST_API void fracest_curve_free(fracest_curve* c);

/* ---- files ---- */
/* 16 hex digits of the FNV-1a 64 digest of the file; `hex` needs 17 bytes. */
FRACEST_API fracest_status fracest_file_digest(const char* path, char* hex);
FRACEST_API fracest_status fracest_write_text(const char* path, const char* text);
FRACEST_API fracest_status fracest_read_text(const char* path, char** text);
FRACEST_API void fracest_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif
