/* Exercises the shared library through its C header only. */
#include <fracest/fracest.h>
#include <math.h>
#include <stdio.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_point(const char* fixture) {
  fracest_sample* s = NULL;
  fracest_report* r = NULL;
  double v = 0.0;
  size_t n = 0;
  int cols = 0;
  EXPECT(fracest_sample_load(fixture, &s) == FRACEST_OK);
  EXPECT(fracest_sample_shape(s, &n, &cols) == FRACEST_OK);
  EXPECT(n == 200 && cols == 1);
  EXPECT(fracest_point(s, 0.25, 0.5, 0.95, &r) == FRACEST_OK);
  EXPECT(fracest_report_scalar(r, "estimate", &v) == FRACEST_OK);
  EXPECT(fabs(v - 0.33102123481022886) < 1e-13);
  EXPECT(fracest_report_scalar(r, "no_such_key", &v) == FRACEST_E_INVALID);
  const char* js = NULL;
  EXPECT(fracest_report_json(r, &js) == FRACEST_OK);
  EXPECT(js != NULL && strstr(js, "\"stderr\"") != NULL);
  fracest_report_free(r);
  r = NULL;
  EXPECT(fracest_point(s, 0.6, 0.5, 0.95, &r) == FRACEST_E_REGIME);
  EXPECT(r == NULL);
  EXPECT(strstr(fracest_last_error(), "1/2") != NULL);
  fracest_sample_free(s);
}

static void test_validation(void) {
  fracest_sample* s = NULL;
  const double bad[] = {0.1, -1.0};
  EXPECT(fracest_sample_from_values(bad, 2, &s) == FRACEST_E_INVALID);
  EXPECT(fracest_sample_load("/nonexistent/file.csv", &s) == FRACEST_E_IO);
  EXPECT(fracest_check_estimation_order(1.5) == FRACEST_E_INVALID);
  EXPECT(fracest_check_estimation_order(0.5) == FRACEST_E_REGIME);
  EXPECT(fracest_check_estimation_order(0.25) == FRACEST_OK);
  EXPECT(fracest_point(NULL, 0.25, 0.5, 0.95, NULL) == FRACEST_E_INVALID);
}

static void test_mixed(void) {
  const double xs[] = {0.5};
  const double ys[] = {0.5};
  fracest_sample* s = NULL;
  fracest_report* r = NULL;
  double v = 0.0;
  EXPECT(fracest_sample_from_pairs(xs, ys, 1, &s) == FRACEST_OK);
  EXPECT(fracest_mixed(s, 0.25, 0.25, 0.25, 0.25, 0, &r) == FRACEST_OK);
  EXPECT(fracest_report_scalar(r, "estimate", &v) == FRACEST_OK);
  /* summand 2 divided by Gamma(3/4)^2 */
  EXPECT(fabs(v - 2.0 / (1.2254167024651776 * 1.2254167024651776)) < 1e-12);
  fracest_report_free(r);
  fracest_sample_free(s);
}

static void test_curve(const char* tmpdir) {
  fracest_curve* c = NULL;
  fracest_curve* back = NULL;
  char path[512];
  const char* csv = NULL;
  EXPECT(fracest_curve_law("uniform", 0.25, 256, 1.0, &c) == FRACEST_OK);
  EXPECT(fracest_curve_size(c) == 257);
  EXPECT(fracest_curve_csv(c, &csv) == FRACEST_OK);
  snprintf(path, sizeof path, "%s/capi_curve.csv", tmpdir);
  EXPECT(fracest_write_text(path, csv) == FRACEST_OK);
  EXPECT(fracest_curve_load(path, &back) == FRACEST_OK);
  EXPECT(fracest_curve_size(back) == fracest_curve_size(c));
  EXPECT(memcmp(fracest_curve_values(back), fracest_curve_values(c), 257 * sizeof(double)) == 0);
  EXPECT(memcmp(fracest_curve_nodes(back), fracest_curve_nodes(c), 257 * sizeof(double)) == 0);
  char hex[17];
  EXPECT(fracest_file_digest(path, hex) == FRACEST_OK);
  EXPECT(strlen(hex) == 16);
  fracest_curve_free(back);
  fracest_curve_free(c);
}

static void test_series(void) {
  fracest_vector* v = NULL;
  fracest_report* r = NULL;
  int flag = 0;
  EXPECT(fracest_series_generate("white", 256, 3, &v) == FRACEST_OK);
  EXPECT(fracest_vector_size(v) == 256);
  EXPECT(fracest_spectral_estimate(v, 0.25, 8, 3.141592653589793, &r) == FRACEST_OK);
  fracest_report_free(r);
  fracest_vector_free(v);
  EXPECT(fracest_series_generate("pink", 256, 3, &v) == FRACEST_E_INVALID);
  EXPECT(fracest_experiment("kiefer", "n=20\nreps=50\n", 1, 2, &r) == FRACEST_OK);
  EXPECT(fracest_report_flag(r, "exact_below_bound", &flag) == FRACEST_OK && flag == 1);
  fracest_report_free(r);
  EXPECT(fracest_experiment("kiefer", "reps=oops\n", 1, 1, &r) == FRACEST_E_INVALID);
  EXPECT(strstr(fracest_experiment_names(), "abel-inversion") != NULL);
  EXPECT(fracest_selftest(&r) == FRACEST_OK);
  EXPECT(fracest_report_flag(r, "normal_quantile", &flag) == FRACEST_OK && flag == 1);
  fracest_report_free(r);
}

int main(int argc, char** argv) {
  if (argc < 3) {
    fprintf(stderr, "usage: %s FIXTURE TMPDIR\n", argv[0]);
    return 2;
  }
  EXPECT(strlen(fracest_version()) > 0);
  test_point(argv[1]);
  test_validation();
  test_mixed();
  test_curve(argv[2]);
  test_series();
  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
