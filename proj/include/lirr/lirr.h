#ifndef LIRR_H
#define LIRR_H

/* C interface to liblirr. Every call returns a status; on failure the
 * message is available from lirr_last_error() on the same thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(LIRR_BUILDING_LIBRARY)
#define LIRR_API __attribute__((visibility("default")))
#else
#define LIRR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lirr_status {
  LIRR_OK = 0,
  LIRR_ERR_CONFIG = 1,
  LIRR_ERR_PRECONDITION = 2,
  LIRR_ERR_RANGE = 3,
  LIRR_ERR_OVERLAP = 4,
  LIRR_ERR_NUMERICAL = 5,
  LIRR_ERR_IO = 6,
  LIRR_ERR_INTERNAL = 7
} lirr_status;

typedef struct lirr_experiment lirr_experiment;
typedef struct lirr_cocycle lirr_cocycle;

LIRR_API const char* lirr_version(void);
LIRR_API const char* lirr_last_error(void);
LIRR_API const char* lirr_status_name(lirr_status status);

/* Experiments. The config is validated lazily by lirr_experiment_run so that
 * overrides apply first. */
LIRR_API lirr_status lirr_experiment_load(const char* path, lirr_experiment** out);
LIRR_API lirr_status lirr_experiment_parse(const char* json_text, lirr_experiment** out);
LIRR_API void lirr_experiment_free(lirr_experiment* e);
LIRR_API lirr_status lirr_experiment_set_output_dir(lirr_experiment* e, const char* dir);
LIRR_API lirr_status lirr_experiment_set_stages(lirr_experiment* e, int stages);
LIRR_API lirr_status lirr_experiment_set_seed(lirr_experiment* e, uint64_t seed);
LIRR_API lirr_status lirr_experiment_set_parallel(lirr_experiment* e, int parallel);

/* command: spectrum | construct | dc1 | diverge | audit.
 * exit_code: 0 all checks pass, 2 some check failed, 1 invalid input.
 * A failed check is not an error: the status is LIRR_OK. */
LIRR_API lirr_status lirr_experiment_run(lirr_experiment* e, const char* command, int* exit_code);

/* JSON summary of the last run. With buf == NULL only *needed is set
 * (including the terminating NUL). */
LIRR_API lirr_status lirr_experiment_summary(const lirr_experiment* e, char* buf, size_t size, size_t* needed);

/* Cocycles over the full shift on alphabet_size symbols. matrices holds
 * alphabet_size^(2w+1) row-major dimension x dimension blocks; the block for
 * the window s_{-w}..s_w sits at the base-alphabet_size number with s_{-w}
 * as its leading digit. */
LIRR_API lirr_status lirr_cocycle_create(int alphabet_size, int dimension, int window_radius, const double* matrices,
                                         size_t count, lirr_cocycle** out);
LIRR_API void lirr_cocycle_free(lirr_cocycle* c);
LIRR_API lirr_status lirr_cocycle_bound(const lirr_cocycle* c, double* out);
LIRR_API lirr_status lirr_cocycle_dimension(const lirr_cocycle* c, int* out);

/* Lyapunov exponents of the periodic measure on word^infinity, descending,
 * with multiplicity: out must hold dimension values. */
LIRR_API lirr_status lirr_periodic_spectrum(const lirr_cocycle* c, const int* word, size_t length, double* out);

/* (1/n) log |A(x, n)| for x = word^infinity; n is a decimal integer. */
LIRR_API lirr_status lirr_finite_time_mle(const lirr_cocycle* c, const int* word, size_t length, const char* n,
                                          double* out);

LIRR_API lirr_status lirr_exterior_power(const lirr_cocycle* c, int degree, lirr_cocycle** out);

#ifdef __cplusplus
}
#endif

#endif
