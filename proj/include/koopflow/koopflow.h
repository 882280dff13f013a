#pragma once

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Stable C surface for the koopflow toolkit.
 *
 * Every entry point is exception-free: failures come back as a kf_status and
 * the message of the calling thread's most recent failure is retained for
 * kf_last_error(). Handles are opaque; a kf_config owns everything it needs,
 * so one handle can drive any number of runs.
 */

typedef enum kf_status {
  KF_OK = 0,
  KF_ERR_INTERNAL = 1,         /* unexpected failure (allocation, logic) */
  KF_ERR_CONFIG = 2,           /* bad run configuration or config file */
  KF_ERR_SIMULATION = 3,       /* ground-truth simulator failure */
  KF_ERR_FIT = 4,              /* surrogate identification failure */
  KF_ERR_IO = 5,               /* artifact read/write failure */
  KF_ERR_INVALID_ARGUMENT = 6, /* bad argument to a C-API call */
} kf_status;

/* Library version, "major.minor.patch". Never NULL. */
const char* kf_version(void);

/* Message of this thread's most recent failed call; "" after a success.
 * The pointer stays valid until the thread's next koopflow call. */
const char* kf_last_error(void);

/* Run configuration. Keys and types match the config JSON one for one:
 *   case           string  "a" | "b"
 *   nx             int     odd grid edge >= 3
 *   dt_days        double  snapshot spacing
 *   train_steps    int     training window length
 *   shutin_steps   int     case-a shut-in length (>= 0)
 *   highrate_steps int     case-a high-rate length
 *   test_steps     int     case-b test window length
 *   q_train        double  case-a training rate [m^3/day]
 *   rel_tol        double  identification rank cutoff, relative to sigma_max
 *   out_dir        string  artifact directory
 *   models         string  comma-separated subset of
 *                          dmdc,cckm-level,cckm-delta,hybrid-b — or "all"
 * A handle always holds a complete, validated configuration; a setter that
 * would break validity leaves the handle unchanged and reports the error. */
typedef struct kf_config kf_config;

/* Fresh configuration with library defaults for the given case ("a" or "b"). */
kf_status kf_config_create(const char* case_name, kf_config** out);

/* Configuration from a JSON file. Unknown keys are config errors. */
kf_status kf_config_load(const char* path, kf_config** out);

kf_status kf_config_set_int(kf_config* cfg, const char* key, int value);
kf_status kf_config_set_double(kf_config* cfg, const char* key, double value);
kf_status kf_config_set_string(kf_config* cfg, const char* key, const char* value);

/* Canonical JSON text of the configuration. Sets *needed to strlen+1; copies
 * when buf holds at least that many bytes. Size with buf = NULL, cap = 0. */
kf_status kf_config_dump(const kf_config* cfg, char* buf, size_t cap, size_t* needed);

void kf_config_destroy(kf_config* cfg);

/* Full pipeline: simulate, fit, evaluate into out_dir. Equivalent to the
 * three stage calls in order — same code path, identical artifacts. */
kf_status kf_run_case(const kf_config* cfg);

/* Individual stages; each later stage reads the artifacts of the earlier
 * ones from out_dir and rejects them if they came from another config. */
kf_status kf_stage_simulate(const kf_config* cfg);
kf_status kf_stage_fit(const kf_config* cfg);
kf_status kf_stage_evaluate(const kf_config* cfg);

#ifdef __cplusplus
} /* extern "C" */
#endif
