// Copyright 2026 The dsmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the dsmc evidence-combination engine.
 *
 * Every function returns a dsmc_status. On failure the message is available
 * from dsmc_last_error() on the calling thread until the next call. Handles
 * are opaque and owned by the caller; release them with the matching
 * *_free function. Strings returned through handles live as long as the
 * handle; strings returned through char** must be released with
 * dsmc_string_free. */
#ifndef DSMC_DSMC_H
#define DSMC_DSMC_H

#include <stddef.h>
#include <stdint.h>

#if defined(DSMC_BUILDING_LIBRARY)
#define DSMC_API __attribute__((visibility("default")))
#else
#define DSMC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2-4 double as the CLI exit codes. */
typedef enum dsmc_status {
  DSMC_OK = 0,
  DSMC_ERR_INTERNAL = 1,
  DSMC_ERR_INPUT = 2,    /* syntax, validation, bad arguments */
  DSMC_ERR_CONFLICT = 3, /* restart cap hit, or total conflict */
  DSMC_ERR_RESOURCE = 4, /* size or time cap exceeded */
  DSMC_ERR_CONTRACT = 5  /* precondition broken, e.g. non-SSF source on the SSF path */
} dsmc_status;

typedef struct dsmc_problem dsmc_problem;
typedef struct dsmc_set_list dsmc_set_list;

DSMC_API const char* dsmc_version(void);
DSMC_API const char* dsmc_last_error(void);
/* Conflict estimate carried by the last DSMC_ERR_CONFLICT from a sampler. */
DSMC_API double dsmc_last_conflict_estimate(void);
DSMC_API void dsmc_string_free(char* s);

/* ---- problems ---------------------------------------------------------- */

/* Parses problem text. With validate = 0 only syntax is checked, so that
 * dsmc_problem_violation can list every broken invariant. */
DSMC_API dsmc_status dsmc_problem_parse(const char* text, int validate, dsmc_problem** out);
DSMC_API dsmc_status dsmc_problem_load(const char* path, int validate, dsmc_problem** out);
DSMC_API void dsmc_problem_free(dsmc_problem* p);

DSMC_API int dsmc_problem_is_logic(const dsmc_problem* p);
DSMC_API size_t dsmc_problem_source_count(const dsmc_problem* p);
/* Frame elements, or atoms for a logic problem. */
DSMC_API size_t dsmc_problem_frame_size(const dsmc_problem* p);
DSMC_API dsmc_status dsmc_problem_render(const dsmc_problem* p, char** out);

DSMC_API size_t dsmc_problem_violation_count(const dsmc_problem* p);
DSMC_API const char* dsmc_problem_violation(const dsmc_problem* p, size_t i);

/* ---- Monte-Carlo ------------------------------------------------------- */

typedef struct dsmc_config {
  uint64_t trials;
  uint64_t seed;
  uint64_t restart_cap;
  uint32_t workers;
  int simple_support_path;
} dsmc_config;

DSMC_API void dsmc_config_default(dsmc_config* cfg);

/* Smallest N with N >= 9 / (4 k^2). */
DSMC_API dsmc_status dsmc_plan_trials(double accuracy, uint64_t* trials);

typedef struct dsmc_estimate {
  double value;
  uint64_t trials;
  uint64_t successes;
  uint64_t restarts;
  double sd_bound;
  double plugin_sd;
  double conflict_estimate;
  double lower;
  double upper;
} dsmc_estimate;

/* Bel for each query set expression ("*", "{a b}"), from one trial stream.
 * `out` must hold `count` entries. Set problems only. */
DSMC_API dsmc_status dsmc_estimate_queries(const dsmc_problem* p, const char* const* queries,
                                           size_t count, const dsmc_config* cfg, dsmc_estimate* out);

typedef struct dsmc_bounded_estimate {
  double lower;
  double upper;
  uint64_t trials;
  uint64_t successes;
  uint64_t timeouts;
  uint64_t restarts;
  double sd_bound;
  double conflict_estimate;
} dsmc_bounded_estimate;

/* Bel of a clause ("p | !q") for a logic problem. step_budget = 0 means
 * unlimited. */
DSMC_API dsmc_status dsmc_logic_estimate(const dsmc_problem* p, const char* clause,
                                         const dsmc_config* cfg, uint64_t step_budget,
                                         dsmc_bounded_estimate* out);

DSMC_API dsmc_status dsmc_conflict_estimate(const dsmc_problem* p, const dsmc_config* cfg,
                                            double* kappa_hat, double* expected_loops);

/* Most frequent realized intersections, as a set list of (set, frequency, count). */
DSMC_API dsmc_status dsmc_subset_scan(const dsmc_problem* p, const dsmc_config* cfg,
                                      size_t max_report, dsmc_set_list** out);

/* ---- exact ------------------------------------------------------------- */

typedef enum dsmc_exact_method {
  DSMC_EXACT_MASS = 0,      /* fold of Dempster's rule in mass space */
  DSMC_EXACT_ENUMERATE = 1  /* sum over the joint outcome space */
} dsmc_exact_method;

typedef struct dsmc_exact_options {
  dsmc_exact_method method;
  uint64_t max_focal_sets;
  double time_limit_seconds; /* <= 0: none */
  uint64_t max_outcomes;
  uint32_t workers;
} dsmc_exact_options;

DSMC_API void dsmc_exact_options_default(dsmc_exact_options* opts);

typedef struct dsmc_exact_result {
  double bel;
  double pl;
  double conflict;
} dsmc_exact_result;

/* Exact Bel/Pl for each query. Logic problems are translated to their
 * assignment frame and take clause queries. */
DSMC_API dsmc_status dsmc_exact_queries(const dsmc_problem* p, const char* const* queries,
                                        size_t count, const dsmc_exact_options* opts,
                                        dsmc_exact_result* out);

DSMC_API dsmc_status dsmc_conflict_exact(const dsmc_problem* p, const dsmc_exact_options* opts,
                                         double* conflict);

/* Combined mass function as a set list of (set, mass, 0). */
DSMC_API dsmc_status dsmc_combine(const dsmc_problem* p, const dsmc_exact_options* opts,
                                  dsmc_set_list** out, double* conflict);

DSMC_API size_t dsmc_set_list_size(const dsmc_set_list* l);
DSMC_API const char* dsmc_set_list_set(const dsmc_set_list* l, size_t i);
DSMC_API double dsmc_set_list_value(const dsmc_set_list* l, size_t i);
DSMC_API uint64_t dsmc_set_list_count(const dsmc_set_list* l, size_t i);
DSMC_API void dsmc_set_list_free(dsmc_set_list* l);

/* ---- generation and benchmarking -------------------------------------- */

typedef struct dsmc_generate_options {
  size_t sources;
  size_t frame_size;
  double weight_lo;
  double weight_hi;
  double focus_density;
  uint64_t seed;
  double target_conflict; /* < 0: use focus_density as given */
  uint64_t conflict_trials;
} dsmc_generate_options;

DSMC_API void dsmc_generate_options_default(dsmc_generate_options* opts);
DSMC_API dsmc_status dsmc_generate(const dsmc_generate_options* opts, dsmc_problem** out,
                                   double* kappa_hat, double* focus_density);

typedef struct dsmc_bench_options {
  uint64_t trials;
  uint64_t seed;
  int repetitions;
  uint32_t workers;
  int simple_support_path;
  int whole_frame_query; /* 0: query {x1..x_ceil(n/2)}; 1: query the whole frame */
  double weight_lo;
  double weight_hi;
  double focus_density;
  double target_conflict; /* < 0: none */
  uint64_t exact_max_focal_sets;
  double exact_time_limit_seconds;
} dsmc_bench_options;

DSMC_API void dsmc_bench_options_default(dsmc_bench_options* opts);

typedef struct dsmc_bench_row {
  size_t m;
  size_t n;
  double focus_density;
  double kappa_hat;
  double draws_per_trial;
  uint64_t trials;
  double mc_ms;
  double mc_value;
  int has_exact; /* 0 when the exact run was capped */
  double exact_ms;
  double exact_value;
  double abs_error;
  char note[256];
} dsmc_bench_row;

DSMC_API dsmc_status dsmc_bench_cell(const dsmc_bench_options* opts, size_t m, size_t n,
                                     dsmc_bench_row* row);

/* Least-squares slope of log(mc_ms) against log(m n). */
DSMC_API dsmc_status dsmc_fit_scaling(const dsmc_bench_row* rows, size_t count, double* exponent);

#ifdef __cplusplus
}
#endif

#endif /* DSMC_DSMC_H */
