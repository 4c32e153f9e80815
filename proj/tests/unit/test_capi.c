#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "conelab/conelab.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  EXPECT(strlen(cl_version()) > 0);
  EXPECT(cl_subcommand_count() == 8);
  EXPECT(strcmp(cl_status_name(CL_ERR_NORMALIZATION), "normalization") == 0);

  double v = 0.0;
  EXPECT(cl_lambda("sphere_suspension", "S3", 1000, 2.0, 1.0, &v) == CL_OK);
  EXPECT(fabs(v - 12.0) < 1e-5);
  EXPECT(cl_lambda("no_such_preset", "S3", 100, 2.0, 1.0, &v) == CL_ERR_INVALID_ARGUMENT);
  EXPECT(strlen(cl_last_error()) > 0);
  EXPECT(cl_lambda("sphere_suspension", "S3", 100, 2.0, 1.0, NULL) == CL_ERR_INVALID_ARGUMENT);

  double tau = 0.0;
  EXPECT(cl_nu("sphere_suspension", "S3", 1000, 2.0, 0, &v, &tau) == CL_OK);
  EXPECT(fabs(tau - 1.0 / 6.0) < 1e-5);
  EXPECT(cl_mu("sphere_suspension", "S3", 500, 2.0, 0.5, 1, &v) == CL_OK);

  const double t = 0.2, x = 0.8, y = 1.1, phi = 2.0;
  const double d2 = x * x + y * y - 2 * x * y * cos(phi);
  EXPECT(cl_circle_cone_kernel(t, x, y, phi, &v) == CL_OK);
  EXPECT(fabs(v / (exp(-d2 / (4 * t)) / (4 * M_PI * t)) - 1.0) < 1e-10);
  EXPECT(cl_radial_cone_kernel("S3", 0.1, 0.5, 0.6, &v) == CL_OK && v > 0.0);
  EXPECT(cl_circle_cone_kernel(-1.0, x, y, phi, &v) != CL_OK);

  cl_config* cfg = NULL;
  EXPECT(cl_config_from_string("[run]\nsubcommand = heat-check\n[gridd]\nN = 4\n", &cfg) == CL_ERR_CONFIG);
  EXPECT(strstr(cl_last_error(), "grid.N") != NULL);
  char* near = cl_config_nearest_key("gridd");
  EXPECT(near && strcmp(near, "grid.N") == 0);
  cl_string_free(near);

  EXPECT(cl_config_new("heat-check", &cfg) == CL_OK);
  EXPECT(cl_config_set(cfg, "run.output_dir", "conelab_capi_test") == CL_OK);
  EXPECT(cl_config_set(cfg, "heat.samples", "20") == CL_OK);
  EXPECT(cl_config_set(cfg, "grid.NN", "20") == CL_ERR_CONFIG);
  char* s = NULL;
  EXPECT(cl_config_get(cfg, "heat.samples", &s) == CL_OK && strcmp(s, "20") == 0);
  cl_string_free(s);
  EXPECT(cl_config_effective(cfg, &s) == CL_OK && strstr(s, "[tolerances]") != NULL);
  cl_string_free(s);

  cl_result* res = NULL;
  EXPECT(cl_run(cfg, &res) == CL_OK);
  EXPECT(cl_result_exit_code(res) == 0);
  EXPECT(strcmp(cl_result_status(res), "pass") == 0);
  EXPECT(strstr(cl_result_report_path(res), "report.json") != NULL);
  cl_result_free(res);

  EXPECT(cl_config_set(cfg, "run.subcommand", "flow") == CL_OK);
  EXPECT(cl_config_set(cfg, "flow.normalization", "shrink") == CL_OK);
  EXPECT(cl_config_set(cfg, "flow.entropy", "mu_plus") == CL_OK);
  EXPECT(cl_config_set(cfg, "grid.N", "100") == CL_OK);
  res = NULL;
  EXPECT(cl_run(cfg, &res) == CL_ERR_NORMALIZATION);
  EXPECT(cl_result_exit_code(res) == 1);
  cl_result_free(res);
  cl_config_free(cfg);

  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("capi: all checks passed\n");
  return failures ? 1 : 0;
}
