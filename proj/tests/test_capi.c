/* Exercises the shared library through its C header only. */

#include "lirr/lirr.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static const char* desk_json =
    "{\"schema_version\": 1,"
    " \"cocycle\": {\"dimension\": 2, \"entries\": ["
    "   {\"word\": [0], \"matrix\": [4, 0, 0, 0.25]},"
    "   {\"word\": [1], \"matrix\": [1, 0, 0, 1]}]},"
    " \"measures\": {\"nu\": [0, 1], \"omega\": [1]},"
    " \"stages\": 2, \"p_sequences\": [[0, 1, 0], [0, 0, 1]],"
    " \"cone_step_cap\": 200, \"sandwich_samples\": 20}";

static void cocycles(void) {
  const double table[8] = {4, 0, 0, 0.25, 1, 0, 0, 1};
  lirr_cocycle* c = NULL;
  EXPECT(lirr_cocycle_create(2, 2, 0, table, 8, &c) == LIRR_OK);
  EXPECT(c != NULL);

  double bound = 0;
  EXPECT(lirr_cocycle_bound(c, &bound) == LIRR_OK);
  EXPECT(fabs(bound - 4.0) < 1e-12);

  const int nu[2] = {0, 1};
  double spec[2] = {0, 0};
  EXPECT(lirr_periodic_spectrum(c, nu, 2, spec) == LIRR_OK);
  EXPECT(fabs(spec[0] - log(2.0)) < 1e-12);
  EXPECT(fabs(spec[1] + log(2.0)) < 1e-12);

  double mle = 0;
  EXPECT(lirr_finite_time_mle(c, nu, 2, "1000000000000000000000000", &mle) == LIRR_OK);
  EXPECT(fabs(mle - log(2.0)) < 1e-12);
  EXPECT(lirr_finite_time_mle(c, nu, 2, "abc", &mle) == LIRR_ERR_CONFIG);
  EXPECT(strlen(lirr_last_error()) > 0);

  const int bad[1] = {5};
  EXPECT(lirr_periodic_spectrum(c, bad, 1, spec) == LIRR_ERR_RANGE);

  lirr_cocycle* e = NULL;
  EXPECT(lirr_exterior_power(c, 2, &e) == LIRR_OK);
  int dim = 0;
  EXPECT(lirr_cocycle_dimension(e, &dim) == LIRR_OK && dim == 1);
  EXPECT(lirr_exterior_power(c, 3, &e) == LIRR_ERR_RANGE);
  lirr_cocycle_free(e);
  lirr_cocycle_free(c);

  const double singular[8] = {0, 0, 0, 0, 1, 0, 0, 1};
  EXPECT(lirr_cocycle_create(2, 2, 0, singular, 8, &c) == LIRR_ERR_CONFIG);
  EXPECT(c == NULL);
  EXPECT(lirr_cocycle_create(2, 2, 0, table, 4, &c) == LIRR_ERR_CONFIG);
  EXPECT(lirr_cocycle_bound(NULL, &bound) == LIRR_ERR_PRECONDITION);
}

static void experiments(const char* out_dir) {
  lirr_experiment* e = NULL;
  EXPECT(lirr_experiment_parse("{\"schema_version\": 9}", &e) == LIRR_ERR_CONFIG);
  EXPECT(strstr(lirr_last_error(), "schema_version") != NULL);
  EXPECT(lirr_experiment_load("/nonexistent/config.json", &e) == LIRR_ERR_CONFIG);

  EXPECT(lirr_experiment_parse(desk_json, &e) == LIRR_OK);
  EXPECT(lirr_experiment_set_output_dir(e, out_dir) == LIRR_OK);
  EXPECT(lirr_experiment_set_stages(e, 0) == LIRR_ERR_CONFIG);
  EXPECT(lirr_experiment_set_seed(e, 7) == LIRR_OK);
  EXPECT(lirr_experiment_set_parallel(e, 0) == LIRR_OK);

  int code = -1;
  EXPECT(lirr_experiment_run(e, "diverge", &code) == LIRR_OK);
  EXPECT(code == 0);
  size_t needed = 0;
  EXPECT(lirr_experiment_summary(e, NULL, 0, &needed) == LIRR_OK);
  EXPECT(needed > 1);
  char* buf = malloc(needed);
  EXPECT(lirr_experiment_summary(e, buf, needed - 1, &needed) == LIRR_ERR_RANGE);
  EXPECT(lirr_experiment_summary(e, buf, needed, &needed) == LIRR_OK);
  EXPECT(strstr(buf, "\"divergent\"") != NULL);
  free(buf);

  EXPECT(lirr_experiment_run(e, "plot", &code) == LIRR_ERR_CONFIG);
  EXPECT(code == 1);
  lirr_experiment_free(e);
}

int main(int argc, char** argv) {
  EXPECT(strcmp(lirr_version(), "0.1.0") == 0);
  EXPECT(strcmp(lirr_status_name(LIRR_ERR_OVERLAP), "overlap") == 0);
  cocycles();
  experiments(argc > 1 ? argv[1] : "capi_out");
  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("C API: all checks passed\n");
  return failures ? 1 : 0;
}
