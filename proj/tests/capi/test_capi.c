/* Exercises the shared library through the public header only. */
#include <magweyl/magweyl.h>

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

static void test_frequencies(void) {
  /* g = I, F = [[0, 2], [-2, 0]]: f = 2 */
  const double g[4] = {1, 0, 0, 1};
  const double F[4] = {0, 2, -2, 0};
  double f[1] = {0};
  size_t r = 0;
  EXPECT(mw_characteristic_frequencies(g, F, 2, f, &r) == MW_OK);
  EXPECT(r == 1);
  EXPECT(fabs(f[0] - 2.0) < 1e-12);
  EXPECT(mw_characteristic_frequencies(g, F, 0, f, &r) == MW_ERROR_INVALID_ARGUMENT);
  EXPECT(strcmp(mw_last_error_field(), "d") == 0);
  EXPECT(mw_characteristic_frequencies(NULL, F, 2, f, &r) == MW_ERROR_NULL_POINTER);
}

static void test_levels(void) {
  const double f[2] = {1.0, 2.0};
  char* json = NULL;
  EXPECT(mw_landau_levels(f, 2, 5.0, &json) == MW_OK);
  EXPECT(json != NULL && strstr(json, "\"energy\":3.0") != NULL);
  mw_string_free(json);
}

static void test_scenario_and_count(void) {
  mw_scenario_t s = NULL;
  EXPECT(mw_scenario_create(&s, "const2d", NULL, 8.0, 1.0 / 32) == MW_OK);
  int d = 0;
  EXPECT(mw_scenario_dimension(s, &d) == MW_OK && d == 2);
  const double x[2] = {0.1, 0.1};
  double f[1];
  size_t r = 0;
  EXPECT(mw_scenario_frequencies(s, x, f, &r) == MW_OK);
  EXPECT(r == 1 && fabs(f[0] - 1.0) < 1e-12);

  mw_hamiltonian_t H = NULL;
  EXPECT(mw_hamiltonian_assemble(&H, s, 8.0, 1.0 / 32, 48, NULL) == MW_OK);
  size_t n = 0;
  EXPECT(mw_hamiltonian_size(H, &n) == MW_OK && n == 48 * 48);
  int64_t c = 0;
  EXPECT(mw_hamiltonian_count(H, -0.5, "auto", &c) == MW_OK);
  EXPECT(c == 12);
  EXPECT(mw_hamiltonian_count(H, -0.5, "lanczos", &c) == MW_ERROR_INVALID_ARGUMENT);
  EXPECT(mw_hamiltonian_destroy(H) == MW_OK);

  /* mu off the flux lattice */
  EXPECT(mw_hamiltonian_assemble(&H, s, 9.0, 1.0 / 32, 48, NULL) == MW_ERROR_INVALID_ARGUMENT);
  EXPECT(H == NULL);
  EXPECT(strlen(mw_last_error_message()) > 0);
  EXPECT(mw_scenario_destroy(s) == MW_OK);
  EXPECT(mw_scenario_destroy(NULL) == MW_OK);
}

static void test_errors(void) {
  mw_scenario_t s = NULL;
  EXPECT(mw_scenario_create(&s, "nope", NULL, 0, 0) == MW_ERROR_INVALID_ARGUMENT);
  EXPECT(s == NULL);
  EXPECT(mw_scenario_create(&s, "varV2d", "{\"v_slope\": 0.5, \"bogus\": 1}", 0, 0) == MW_ERROR_INVALID_ARGUMENT);
  EXPECT(strcmp(mw_last_error_field(), "scenario.bogus") == 0);
  EXPECT(mw_scenario_create(&s, "varV2d", "{not json", 0, 0) == MW_ERROR_INVALID_ARGUMENT);

  char* out = NULL;
  EXPECT(mw_analyze("{\"scenario\": \"const4d\", \"grid\": -1}", &out) == MW_ERROR_INVALID_ARGUMENT);
  EXPECT(out == NULL);
  EXPECT(mw_analyze("{}", NULL) == MW_ERROR_NULL_POINTER);
}

static void test_commands(void) {
  char* out = NULL;
  EXPECT(mw_analyze("{\"scenario\": \"resonant4d\", \"mu\": 3, \"h\": 0.05}", &out) == MW_OK);
  EXPECT(out != NULL && strstr(out, "\"frequencies\":[") != NULL);
  mw_string_free(out);
  out = NULL;
  EXPECT(mw_weyl("{\"scenario\": \"const2d\", \"mu\": 8, \"h\": 0.03125, \"tau\": -0.5}", &out) == MW_OK);
  EXPECT(out != NULL && strstr(out, "\"value\"") != NULL);
  mw_string_free(out);
  out = NULL;
  EXPECT(mw_reduce("{\"scenario\": \"const4d\", \"mu\": 2}", &out) == MW_OK);
  EXPECT(out != NULL && strstr(out, "symplectic_residual") != NULL);
  mw_string_free(out);
}

int main(void) {
  printf("magweyl %s\n", mw_version());
  test_frequencies();
  test_levels();
  test_scenario_and_count();
  test_errors();
  test_commands();
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
