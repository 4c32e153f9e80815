#ifndef CONELAB_H
#define CONELAB_H

#include <stddef.h>

#if defined(_WIN32)
#define CL_API __declspec(dllexport)
#else
#define CL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cl_status {
  CL_OK = 0,
  CL_ERR_INVALID_ARGUMENT = 1,
  CL_ERR_PRECONDITION = 2,
  CL_ERR_TRUNCATION = 3,
  CL_ERR_CONVERGENCE = 4,
  CL_ERR_POSITIVITY = 5,
  CL_ERR_OVERFLOW = 6,
  CL_ERR_NORMALIZATION = 7,
  CL_ERR_IO = 8,
  CL_ERR_CONFIG = 9,
  CL_ERR_INTERNAL = 10
} cl_status;

typedef struct cl_config cl_config;
typedef struct cl_result cl_result;

CL_API const char* cl_version(void);
CL_API const char* cl_status_name(cl_status status);
/* Message of the last failed call on this thread; empty when none. */
CL_API const char* cl_last_error(void);
/* Frees strings returned through char** out-parameters. */
CL_API void cl_string_free(char* s);

CL_API size_t cl_subcommand_count(void);
CL_API const char* cl_subcommand_name(size_t index);
/* Config keys are "section.key". */
CL_API size_t cl_config_key_count(void);
CL_API const char* cl_config_key_name(size_t index);
/* Closest valid key by edit distance; free with cl_string_free. */
CL_API char* cl_config_nearest_key(const char* key);

CL_API cl_status cl_config_new(const char* subcommand, cl_config** out);
CL_API cl_status cl_config_from_file(const char* path, cl_config** out);
CL_API cl_status cl_config_from_string(const char* text, cl_config** out);
CL_API cl_status cl_config_set(cl_config* cfg, const char* key, const char* value);
CL_API cl_status cl_config_get(const cl_config* cfg, const char* key, char** out);
/* Validated INI text with all defaults filled. */
CL_API cl_status cl_config_effective(const cl_config* cfg, char** out);
CL_API void cl_config_free(cl_config* cfg);

/* Runs the subcommand. Returns CL_OK once a report was produced (exit code 0
 * or 2); otherwise the error status, with *out still describing the failure
 * when it could be allocated. */
CL_API cl_status cl_run(const cl_config* cfg, cl_result** out);
CL_API int cl_result_exit_code(const cl_result* r);
CL_API const char* cl_result_status(const cl_result* r);
CL_API const char* cl_result_message(const cl_result* r);
CL_API const char* cl_result_report_path(const cl_result* r);
CL_API void cl_result_free(cl_result* r);

/* Direct evaluations on a preset metric over a built-in or file link. */
CL_API cl_status cl_lambda(const char* preset, const char* link, int N, double p, double scale, double* value);
CL_API cl_status cl_mu(const char* preset, const char* link, int N, double p, double tau, int plus, double* value);
CL_API cl_status cl_nu(const char* preset, const char* link, int N, double p, int plus, double* value, double* tau);
/* Heat kernel on the cone over the unit circle. */
CL_API cl_status cl_circle_cone_kernel(double t, double x, double x_tilde, double phi, double* value);
/* Mode-0 cone kernel divided by vol_F. */
CL_API cl_status cl_radial_cone_kernel(const char* link, double t, double x, double x_tilde, double* value);

#ifdef __cplusplus
}
#endif

#endif
