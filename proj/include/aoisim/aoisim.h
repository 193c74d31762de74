#ifndef AOISIM_AOISIM_H
#define AOISIM_AOISIM_H

/* C interface to the age-of-information queue simulator.
 *
 * Every object is an opaque handle released by its *_destroy function.
 * Functions returning aoisim_status leave a message for aoisim_last_error()
 * on failure; the message is per thread and lives until the next failing
 * call on that thread. Strings returned by accessors stay valid until the
 * owning handle is destroyed. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(AOISIM_BUILDING)
#    define AOISIM_API __declspec(dllexport)
#  else
#    define AOISIM_API __declspec(dllimport)
#  endif
#else
#  define AOISIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aoisim_status {
  AOISIM_OK = 0,
  AOISIM_INVALID_ARGUMENT = 1,
  AOISIM_PARAMETERIZATION = 2,
  AOISIM_EMPTY_TRACE = 3,
  AOISIM_UNSUPPORTED_POLICY = 4,
  AOISIM_CONFIG = 5,
  AOISIM_SCOPE = 6,
  AOISIM_IO = 7,
  AOISIM_UNKNOWN_FIGURE = 8,
  AOISIM_INTERNAL = 9
} aoisim_status;

typedef enum aoisim_action {
  AOISIM_ACTION_START = 0,
  AOISIM_ACTION_PREEMPT = 1,
  AOISIM_ACTION_RESUME = 2,
  AOISIM_ACTION_DELIVER = 3,
  AOISIM_ACTION_DISCARD = 4
} aoisim_action;

typedef struct aoisim_trace aoisim_trace;
typedef struct aoisim_result aoisim_result;
typedef struct aoisim_experiment aoisim_experiment;
typedef struct aoisim_verify_report aoisim_verify_report;

AOISIM_API const char* aoisim_version(void);
AOISIM_API const char* aoisim_last_error(void);
AOISIM_API const char* aoisim_status_name(aoisim_status status);

/* Traces */

AOISIM_API aoisim_status aoisim_trace_generate(const char* arrival_family, double arrival_mean,
                                               double arrival_scv, const char* size_family,
                                               double size_mean, double size_scv, size_t n,
                                               uint64_t seed, aoisim_trace** out);
AOISIM_API aoisim_status aoisim_trace_from_arrays(const double* arrivals, const double* sizes,
                                                  size_t n, uint64_t seed, aoisim_trace** out);
AOISIM_API size_t aoisim_trace_size(const aoisim_trace* trace);
AOISIM_API aoisim_status aoisim_trace_get(const aoisim_trace* trace, size_t index,
                                          double* arrival, double* size);
AOISIM_API uint64_t aoisim_trace_hash(const aoisim_trace* trace);
AOISIM_API void aoisim_trace_destroy(aoisim_trace* trace);

/* Single runs */

typedef struct aoisim_summary {
  double avg_aoi;
  double avg_paoi;
  double avg_delay;
  double horizon;
  size_t delivered;
  size_t discarded;
} aoisim_summary;

/* decision_seed may be NULL, in which case RANDOM draws from the trace seed. */
AOISIM_API aoisim_status aoisim_run(const aoisim_trace* trace, const char* policy,
                                    const uint64_t* decision_seed, aoisim_result** out);
AOISIM_API aoisim_status aoisim_result_summary(const aoisim_result* result, aoisim_summary* out);
/* Informative deliveries, starting with the virtual (0, 0) entry. */
AOISIM_API size_t aoisim_result_delivery_count(const aoisim_result* result);
AOISIM_API aoisim_status aoisim_result_delivery(const aoisim_result* result, size_t index,
                                                double* delivered_at, double* gen_time);
AOISIM_API size_t aoisim_result_decision_count(const aoisim_result* result);
AOISIM_API aoisim_status aoisim_result_decision(const aoisim_result* result, size_t index,
                                                double* time, size_t* update_id,
                                                aoisim_action* action);
AOISIM_API void aoisim_result_destroy(aoisim_result* result);

/* Experiments */

typedef struct aoisim_row {
  const char* policy;
  double rho;
  const char* arrival_family;
  double arrival_scv;
  const char* service_family;
  double service_scv;
  const char* metric;
  double mean;
  double ci_halfwidth;
  size_t runs;
  size_t updates;
  uint64_t seed;
  const char* flags;
  uint64_t trace_hash;
} aoisim_row;

AOISIM_API aoisim_status aoisim_experiment_from_json(const char* json, aoisim_experiment** out);
AOISIM_API aoisim_status aoisim_experiment_from_file(const char* path, aoisim_experiment** out);
/* Overrides the worker count (0 = hardware concurrency). */
AOISIM_API aoisim_status aoisim_experiment_set_workers(aoisim_experiment* experiment, size_t workers);
/* Output path from the config, or "" when none was given. */
AOISIM_API const char* aoisim_experiment_output(const aoisim_experiment* experiment);
AOISIM_API aoisim_status aoisim_experiment_run(aoisim_experiment* experiment);
AOISIM_API size_t aoisim_experiment_row_count(const aoisim_experiment* experiment);
AOISIM_API aoisim_status aoisim_experiment_row(const aoisim_experiment* experiment, size_t index,
                                               aoisim_row* out);
/* CSV text of the last run; valid until the next call on this handle. */
AOISIM_API aoisim_status aoisim_experiment_csv(aoisim_experiment* experiment, int verbose,
                                               const char** out);
AOISIM_API aoisim_status aoisim_experiment_write_csv(const aoisim_experiment* experiment,
                                                     const char* path, int verbose);
AOISIM_API void aoisim_experiment_destroy(aoisim_experiment* experiment);

/* Figure presets */

AOISIM_API size_t aoisim_figure_count(void);
AOISIM_API const char* aoisim_figure_id(size_t index);
/* figure may name a panel ("3a") or a whole figure ("3"). */
AOISIM_API aoisim_status aoisim_reproduce(const char* figure, const char* out_dir, int fast,
                                          size_t* files_written);

/* Structural checks */

typedef struct aoisim_verify_options {
  size_t traces;  /* 0 keeps the default; runs per point for proposition 1 */
  size_t updates; /* 0 keeps the default */
  double rho;     /* 0 keeps the default grid */
  uint64_t seed;
  size_t workers;
} aoisim_verify_options;

typedef struct aoisim_check {
  const char* label;
  int passed;
  size_t traces_checked;
  int has_divergence;
  uint64_t divergence_seed;
  double divergence_time;
  int64_t id_a; /* -1 when the policy made no choice at that event */
  int64_t id_b;
  size_t point_count;
} aoisim_check;

typedef struct aoisim_dominance_point {
  double rho;
  size_t runs;
  double mean_base;
  double ci_base;
  double mean_informative;
  double ci_informative;
  const char* verdict;
} aoisim_dominance_point;

AOISIM_API void aoisim_verify_options_init(aoisim_verify_options* opts);
AOISIM_API aoisim_status aoisim_verify(int proposition, const aoisim_verify_options* opts,
                                       aoisim_verify_report** out);
AOISIM_API int aoisim_verify_passed(const aoisim_verify_report* report);
AOISIM_API size_t aoisim_verify_check_count(const aoisim_verify_report* report);
AOISIM_API aoisim_status aoisim_verify_check(const aoisim_verify_report* report, size_t index,
                                             aoisim_check* out);
AOISIM_API aoisim_status aoisim_verify_point(const aoisim_verify_report* report, size_t check,
                                             size_t index, aoisim_dominance_point* out);
AOISIM_API void aoisim_verify_destroy(aoisim_verify_report* report);

#ifdef __cplusplus
}
#endif

#endif
