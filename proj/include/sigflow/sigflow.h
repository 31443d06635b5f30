/* Copyright 2026 The Sigflow Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the sigflow runtime. Every handle is opaque; every fallible
 * call returns an sgf_status and leaves a thread-local message readable
 * through sgf_last_error_message(). Strings returned through char** must be
 * released with sgf_string_free(). */

#ifndef SIGFLOW_SIGFLOW_H_
#define SIGFLOW_SIGFLOW_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SGF_API __declspec(dllexport)
#else
#define SGF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgf_status {
  SGF_OK = 0,
  SGF_E_ALREADY_BOUND = 1,
  SGF_E_TYPE_MISMATCH = 2,
  SGF_E_SELF_BIND = 3,
  SGF_E_UNBOUND_INPUT = 4,
  SGF_E_TASK_FAILURE = 5,
  SGF_E_CYCLE = 6,
  SGF_E_UNREACHABLE = 7,
  SGF_E_DANGLING_INPUT = 8,
  SGF_E_PATH_OUT_OF_RANGE = 9,
  SGF_E_SELECTED_INPUT_EMPTY = 10,
  SGF_E_NOT_CLONEABLE = 11,
  SGF_E_PINNING_INVALID = 12,
  SGF_E_BAD_PARTITION = 13,
  SGF_E_CAPACITY_ZERO = 14,
  SGF_E_SHUTDOWN = 15,
  SGF_E_SPEC_INCONSISTENT = 16,
  SGF_E_INVALID_ARGUMENT = 17,
  SGF_E_IO_ERROR = 18,
  SGF_E_INTERNAL = 99
} sgf_status;

typedef enum sgf_elem_kind { SGF_U8 = 0, SGF_I32 = 1, SGF_F32 = 2, SGF_C32 = 3 } sgf_elem_kind;
typedef enum sgf_cloneability {
  SGF_CLONEABLE = 0,
  SGF_CLONEABLE_WITH_DEEP_COPY = 1,
  SGF_SEQUENTIAL_ONLY = 2
} sgf_cloneability;

/* Codelet return values; anything else is reported as a task failure. */
enum { SGF_TASK_OK = 0, SGF_TASK_ABORT = 1 };

typedef struct sgf_graph sgf_graph;
typedef struct sgf_module sgf_module;
typedef struct sgf_task sgf_task;
typedef struct sgf_socket sgf_socket;
typedef struct sgf_sequence sgf_sequence;
typedef struct sgf_pipeline sgf_pipeline;
typedef struct sgf_bench_report sgf_bench_report;

/* Task body. `state` is the owning module's state pointer. */
typedef int (*sgf_codelet)(sgf_task* task, void* state);
/* Deep copy of a module state for cloning; NULL return means failure. */
typedef void* (*sgf_state_clone)(const void* state);
typedef void (*sgf_state_destroy)(void* state);

SGF_API const char* sgf_status_name(sgf_status status);
SGF_API const char* sgf_last_error_message(void);
SGF_API void sgf_string_free(char* s);

/* Graph: owns every module created in it. */
SGF_API sgf_status sgf_graph_create(sgf_graph** out);
SGF_API void sgf_graph_destroy(sgf_graph* graph);
/* Deterministic DOT dump of all modules. */
SGF_API sgf_status sgf_graph_dump(const sgf_graph* graph, char** out);

/* `state` is owned by the module and released with `destroy` (may be NULL).
 * `clone` is required for cloneable modules that carry state. */
SGF_API sgf_status sgf_module_create(sgf_graph* graph, const char* name, sgf_cloneability cloneability, void* state,
                                     sgf_state_clone clone, sgf_state_destroy destroy, sgf_module** out);
SGF_API sgf_status sgf_task_create(sgf_module* module, const char* name, sgf_codelet fn, sgf_task** out);
SGF_API sgf_status sgf_input_create(sgf_task* task, const char* name, sgf_elem_kind kind, size_t count,
                                    sgf_socket** out);
SGF_API sgf_status sgf_output_create(sgf_task* task, const char* name, sgf_elem_kind kind, size_t count,
                                     sgf_socket** out);
SGF_API sgf_status sgf_bind(sgf_socket* input, sgf_socket* output);
SGF_API sgf_status sgf_unbind(sgf_socket* input);
SGF_API sgf_status sgf_task_find(const sgf_graph* graph, const char* qualified_name, sgf_task** out);

/* Codelet-side accessors (valid only while the task body runs). */
SGF_API const void* sgf_task_input(sgf_task* task, size_t index, size_t* count);
SGF_API void* sgf_task_output(sgf_task* task, size_t index, size_t* count);
SGF_API uint64_t sgf_task_input_generation(sgf_task* task, size_t index);
SGF_API uint64_t sgf_task_exec_count(const sgf_task* task);

/* Sequence over tasks of one graph. */
SGF_API sgf_status sgf_sequence_create(sgf_task* const* first, size_t n_first, sgf_task* const* last, size_t n_last,
                                       sgf_sequence** out);
SGF_API void sgf_sequence_destroy(sgf_sequence* seq);
SGF_API sgf_status sgf_sequence_exec_passes(sgf_sequence* seq, uint64_t passes, uint64_t* aborted);
SGF_API sgf_status sgf_sequence_dump(const sgf_sequence* seq, char** out);
SGF_API sgf_status sgf_sequence_stats_csv(const sgf_sequence* seq, char** out);
SGF_API sgf_status sgf_sequence_duplicate_check(const sgf_sequence* seq, size_t replicas);

/* Pipeline from a JSON plan naming tasks as "module.task". Original bindings
 * come back when the pipeline is destroyed. */
SGF_API sgf_status sgf_pipeline_create(sgf_graph* graph, const char* plan_json, sgf_pipeline** out);
SGF_API void sgf_pipeline_destroy(sgf_pipeline* pipeline);
SGF_API sgf_status sgf_pipeline_exec_frames(sgf_pipeline* pipeline, uint64_t frames, double* frames_per_second);
SGF_API sgf_status sgf_pipeline_stats_csv(const sgf_pipeline* pipeline, double bits_per_frame, char** out);
SGF_API sgf_status sgf_pipeline_dump(const sgf_pipeline* pipeline, char** out);

/* Micro-benchmarks (1..4). pin < 0 leaves the thread unpinned. */
typedef struct sgf_bench_spec {
  int benchmark;
  double task_us;
  uint64_t total_compute_tasks;
  size_t runs;
  int pin;
  int task_timing;
  size_t elem_count;
} sgf_bench_spec;

SGF_API void sgf_bench_spec_default(sgf_bench_spec* spec);
SGF_API sgf_status sgf_bench_run(const sgf_bench_spec* spec, sgf_bench_report** out);
SGF_API void sgf_bench_report_destroy(sgf_bench_report* report);
/* class: "C", "select", "commute" or "iterate". */
SGF_API sgf_status sgf_bench_report_class(const sgf_bench_report* report, const char* cls, uint64_t* exec_count,
                                          double* total_ms);
SGF_API double sgf_bench_report_overhead_pct(const sgf_bench_report* report);
SGF_API double sgf_bench_report_run_time_ms(const sgf_bench_report* report);
/* Tables over several reports. */
SGF_API sgf_status sgf_bench_markdown(const sgf_bench_report* const* reports, size_t n, char** out);
SGF_API sgf_status sgf_bench_csv(const sgf_bench_report* const* reports, size_t n, char** out);
SGF_API sgf_status sgf_bench_sweep_csv(const sgf_bench_spec* base, const double* durations_us, size_t n, char** out);

typedef struct sgf_floor {
  size_t elem_count;
  uint64_t invocations;
  double wrapper_ns;
  double select_ns;
  double commute_ns;
  double iterate_ns;
  double clock_read_ns;
} sgf_floor;

SGF_API sgf_status sgf_bench_floor(size_t elem_count, uint64_t invocations, sgf_floor* out);

typedef struct sgf_pipeline_bench {
  size_t frame_bytes;
  size_t replicas;
  uint64_t frames;
  size_t capacity;
  int copyless;
  int active_wait;
  double stage_us;
} sgf_pipeline_bench;

SGF_API sgf_status sgf_bench_pipeline(const sgf_pipeline_bench* spec, double* frames_per_second);

/* Demo chain. plan_path NULL runs sequentially; an empty string uses the
 * built-in four-stage plan with `decode_workers` replicas. */
typedef struct sgf_demo_config {
  size_t k;
  size_t rep;
  double ebn0_db;
  int noiseless;
  uint64_t seed;
  uint64_t frames;
  size_t decode_workers;
  size_t capacity;
  int copyless;
} sgf_demo_config;

typedef struct sgf_demo_result {
  uint64_t frames;
  uint64_t frame_errors;
  uint64_t bit_errors;
  double fer;
  double ber;
  double wall_s;
  double throughput_mbps;
  uint64_t sink_hash;
  char* summary;   /* release with sgf_string_free */
  char* stage_csv; /* NULL for sequential runs */
} sgf_demo_result;

SGF_API void sgf_demo_config_default(sgf_demo_config* cfg);
SGF_API sgf_status sgf_demo_run(const sgf_demo_config* cfg, const char* plan_path, sgf_demo_result* out);
/* Writes the built-in plan of the demo chain as JSON. */
SGF_API sgf_status sgf_demo_default_plan(const sgf_demo_config* cfg, char** out);

#ifdef __cplusplus
}
#endif

#endif /* SIGFLOW_SIGFLOW_H_ */
