// Copyright 2026 The Sigflow Authors.
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

#include "sigflow/sigflow.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "sigflow/bench.hpp"
#include "sigflow/demo.hpp"
#include "sigflow/error.hpp"
#include "sigflow/graph.hpp"
#include "sigflow/pipeline.hpp"
#include "sigflow/plan_config.hpp"
#include "sigflow/replication.hpp"
#include "sigflow/sequence.hpp"

using namespace sigflow;

struct sgf_graph {
  std::vector<std::unique_ptr<Module>> modules;

  std::vector<Module*> view() const {
    std::vector<Module*> out;
    for (const auto& m : modules) out.push_back(m.get());
    return out;
  }
};

struct sgf_pipeline {
  std::unique_ptr<Pipeline> pipeline;
  PipelineStats last;
};

struct sgf_bench_report {
  bench::OverheadReport report;
};

namespace {

thread_local std::string g_last_error;

class CModule : public Module {
 public:
  CModule(std::string name, Cloneability c, void* state, sgf_state_clone clone, sgf_state_destroy destroy)
      : Module(std::move(name), c), state_(state), clone_(clone), destroy_(destroy) {}
  ~CModule() override {
    if (destroy_ && state_) destroy_(state_);
  }
  void* state() const noexcept { return state_; }

 protected:
  CModule(const CModule& o) : Module(o), state_(nullptr), clone_(o.clone_), destroy_(o.destroy_) {}

  Module* clone_raw() const override {
    std::unique_ptr<CModule> copy(new CModule(*this));
    if (state_ != nullptr) {
      if (clone_ == nullptr)
        throw Error(Errc::not_cloneable, "module '" + name() + "' has state but no clone callback", id());
      copy->state_ = clone_(state_);
      if (copy->state_ == nullptr) throw Error(Errc::not_cloneable, "clone callback of '" + name() + "' failed", id());
    }
    return copy.release();
  }

 private:
  void* state_;
  sgf_state_clone clone_;
  sgf_state_destroy destroy_;
};

template <class F>
sgf_status guard(F&& f) noexcept {
  try {
    f();
    g_last_error.clear();
    return SGF_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<sgf_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SGF_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SGF_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SGF_E_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::invalid_argument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Task* task_of(sgf_task* t) { return reinterpret_cast<Task*>(t); }
const Task* task_of(const sgf_task* t) { return reinterpret_cast<const Task*>(t); }
Socket* socket_of(sgf_socket* s) { return reinterpret_cast<Socket*>(s); }
Sequence* seq_of(sgf_sequence* s) { return reinterpret_cast<Sequence*>(s); }
const Sequence* seq_of(const sgf_sequence* s) { return reinterpret_cast<const Sequence*>(s); }

ElemKind kind_of(sgf_elem_kind k) {
  switch (k) {
    case SGF_U8:
      return ElemKind::u8;
    case SGF_I32:
      return ElemKind::i32;
    case SGF_F32:
      return ElemKind::f32;
    case SGF_C32:
      return ElemKind::c32;
  }
  throw Error(Errc::invalid_argument, "unknown element kind");
}

Cloneability cloneability_of(sgf_cloneability c) {
  switch (c) {
    case SGF_CLONEABLE:
      return Cloneability::cloneable;
    case SGF_CLONEABLE_WITH_DEEP_COPY:
      return Cloneability::cloneable_with_deep_copy;
    case SGF_SEQUENTIAL_ONLY:
      return Cloneability::sequential_only;
  }
  throw Error(Errc::invalid_argument, "unknown cloneability");
}

bench::BenchSpec bench_spec_of(const sgf_bench_spec& s) {
  require(s.benchmark >= 1 && s.benchmark <= 4, "benchmark must be 1..4");
  bench::BenchSpec b;
  b.benchmark = static_cast<bench::Benchmark>(s.benchmark);
  b.task_duration_us = s.task_us;
  b.total_compute_tasks = s.total_compute_tasks;
  b.runs = s.runs;
  if (s.pin >= 0) b.pin = s.pin;
  b.task_timing = s.task_timing != 0;
  b.elem_count = s.elem_count ? s.elem_count : 1;
  return b;
}

demo::ChainConfig chain_config_of(const sgf_demo_config& c) {
  demo::ChainConfig cfg;
  cfg.k = c.k;
  cfg.rep = c.rep;
  cfg.ebn0_db = c.ebn0_db;
  cfg.noiseless = c.noiseless != 0;
  cfg.seed = c.seed;
  cfg.frames = c.frames;
  return cfg;
}

}  // namespace

extern "C" {

const char* sgf_status_name(sgf_status status) {
  if (status == SGF_OK) return "Ok";
  if (status == SGF_E_INTERNAL) return "Internal";
  if (status < SGF_E_ALREADY_BOUND || status > SGF_E_IO_ERROR) return "Unknown";
  static thread_local std::string name;
  name = std::string(to_string(static_cast<Errc>(static_cast<int>(status))));
  return name.c_str();
}

const char* sgf_last_error_message(void) { return g_last_error.c_str(); }

void sgf_string_free(char* s) { std::free(s); }

sgf_status sgf_graph_create(sgf_graph** out) {
  return guard([&] {
    require(out != nullptr, "null output handle");
    *out = new sgf_graph();
  });
}

void sgf_graph_destroy(sgf_graph* graph) { delete graph; }

sgf_status sgf_graph_dump(const sgf_graph* graph, char** out) {
  return guard([&] {
    require(graph && out, "null argument");
    std::vector<const Module*> mods;
    for (const auto& m : graph->modules) mods.push_back(m.get());
    *out = dup_string(dump_graph(mods));
  });
}

sgf_status sgf_module_create(sgf_graph* graph, const char* name, sgf_cloneability cloneability, void* state,
                             sgf_state_clone clone, sgf_state_destroy destroy, sgf_module** out) {
  return guard([&] {
    require(graph && name && out, "null argument");
    auto m = std::make_unique<CModule>(name, cloneability_of(cloneability), state, clone, destroy);
    *out = reinterpret_cast<sgf_module*>(m.get());
    graph->modules.push_back(std::move(m));
  });
}

sgf_status sgf_task_create(sgf_module* module, const char* name, sgf_codelet fn, sgf_task** out) {
  return guard([&] {
    require(module && name && fn && out, "null argument");
    auto* m = reinterpret_cast<CModule*>(module);
    Task& t = m->create_task(name);
    t.set_codelet([fn](Module& mod, Task& task) {
      const int rc = fn(reinterpret_cast<sgf_task*>(&task), static_cast<CModule&>(mod).state());
      if (rc == SGF_TASK_OK) return TaskStatus::ok();
      if (rc == SGF_TASK_ABORT) return TaskStatus::abort();
      throw Error(Errc::task_failure, "codelet returned " + std::to_string(rc));
    });
    *out = reinterpret_cast<sgf_task*>(&t);
  });
}

sgf_status sgf_input_create(sgf_task* task, const char* name, sgf_elem_kind kind, size_t count, sgf_socket** out) {
  return guard([&] {
    require(task && name && out, "null argument");
    *out = reinterpret_cast<sgf_socket*>(&task_of(task)->create_input(name, kind_of(kind), count));
  });
}

sgf_status sgf_output_create(sgf_task* task, const char* name, sgf_elem_kind kind, size_t count, sgf_socket** out) {
  return guard([&] {
    require(task && name && out, "null argument");
    *out = reinterpret_cast<sgf_socket*>(&task_of(task)->create_output(name, kind_of(kind), count));
  });
}

sgf_status sgf_bind(sgf_socket* input, sgf_socket* output) {
  return guard([&] {
    require(input && output, "null socket");
    bind(*socket_of(input), *socket_of(output));
  });
}

sgf_status sgf_unbind(sgf_socket* input) {
  return guard([&] {
    require(input != nullptr, "null socket");
    unbind(*socket_of(input));
  });
}

sgf_status sgf_task_find(const sgf_graph* graph, const char* qualified_name, sgf_task** out) {
  return guard([&] {
    require(graph && qualified_name && out, "null argument");
    const auto mods = graph->view();
    *out = reinterpret_cast<sgf_task*>(&resolve_task(qualified_name, mods));
  });
}

const void* sgf_task_input(sgf_task* task, size_t index, size_t* count) {
  const Task* t = task_of(task);
  if (t == nullptr || index >= t->input_count() || t->input(index).source() == nullptr) return nullptr;
  const FrameBuffer& f = t->input(index).frame();
  if (count) *count = f.count();
  return f.bytes().data();
}

void* sgf_task_output(sgf_task* task, size_t index, size_t* count) {
  Task* t = task_of(task);
  if (t == nullptr || index >= t->output_count()) return nullptr;
  FrameBuffer& f = t->writable(index);
  if (count) *count = f.count();
  return f.bytes().data();
}

uint64_t sgf_task_input_generation(sgf_task* task, size_t index) {
  const Task* t = task_of(task);
  if (t == nullptr || index >= t->input_count() || t->input(index).source() == nullptr) return 0;
  return t->input(index).frame().generation();
}

uint64_t sgf_task_exec_count(const sgf_task* task) { return task ? task_of(task)->stats().exec_count : 0; }

sgf_status sgf_sequence_create(sgf_task* const* first, size_t n_first, sgf_task* const* last, size_t n_last,
                               sgf_sequence** out) {
  return guard([&] {
    require(first && n_first && out, "a sequence needs first tasks");
    std::vector<Task*> f, l;
    for (size_t i = 0; i < n_first; ++i) f.push_back(task_of(first[i]));
    for (size_t i = 0; i < n_last; ++i) l.push_back(task_of(last[i]));
    *out = reinterpret_cast<sgf_sequence*>(new Sequence(std::move(f), std::move(l)));
  });
}

void sgf_sequence_destroy(sgf_sequence* seq) { delete seq_of(seq); }

sgf_status sgf_sequence_exec_passes(sgf_sequence* seq, uint64_t passes, uint64_t* aborted) {
  return guard([&] {
    require(seq != nullptr, "null sequence");
    const ExecStats st = seq_of(seq)->exec_passes(passes);
    if (aborted) *aborted = st.passes_aborted;
  });
}

sgf_status sgf_sequence_dump(const sgf_sequence* seq, char** out) {
  return guard([&] {
    require(seq && out, "null argument");
    *out = dup_string(seq_of(seq)->dump());
  });
}

sgf_status sgf_sequence_stats_csv(const sgf_sequence* seq, char** out) {
  return guard([&] {
    require(seq && out, "null argument");
    *out = dup_string(stats_csv(seq_of(seq)->stats()));
  });
}

sgf_status sgf_sequence_duplicate_check(const sgf_sequence* seq, size_t replicas) {
  return guard([&] {
    require(seq != nullptr, "null sequence");
    CloneSpec spec;
    spec.replica_count = replicas;
    (void)duplicate_sequence(*seq_of(seq), spec);
  });
}

sgf_status sgf_pipeline_create(sgf_graph* graph, const char* plan_json, sgf_pipeline** out) {
  return guard([&] {
    require(graph && plan_json && out, "null argument");
    const auto mods = graph->view();
    auto p = std::make_unique<sgf_pipeline>();
    p->pipeline = std::make_unique<Pipeline>(parse_plan(plan_json, mods));
    *out = p.release();
  });
}

void sgf_pipeline_destroy(sgf_pipeline* pipeline) { delete pipeline; }

sgf_status sgf_pipeline_exec_frames(sgf_pipeline* pipeline, uint64_t frames, double* frames_per_second) {
  return guard([&] {
    require(pipeline != nullptr, "null pipeline");
    pipeline->last = pipeline->pipeline->exec_frames(frames);
    if (frames_per_second) *frames_per_second = pipeline->last.throughput_fps;
  });
}

sgf_status sgf_pipeline_stats_csv(const sgf_pipeline* pipeline, double bits_per_frame, char** out) {
  return guard([&] {
    require(pipeline && out, "null argument");
    *out = dup_string(pipeline->last.csv(bits_per_frame));
  });
}

sgf_status sgf_pipeline_dump(const sgf_pipeline* pipeline, char** out) {
  return guard([&] {
    require(pipeline && out, "null argument");
    *out = dup_string(pipeline->pipeline->dump());
  });
}

void sgf_bench_spec_default(sgf_bench_spec* spec) {
  if (spec == nullptr) return;
  const bench::BenchSpec d;
  spec->benchmark = 1;
  spec->task_us = d.task_duration_us;
  spec->total_compute_tasks = d.total_compute_tasks;
  spec->runs = d.runs;
  spec->pin = -1;
  spec->task_timing = 1;
  spec->elem_count = 1;
}

sgf_status sgf_bench_run(const sgf_bench_spec* spec, sgf_bench_report** out) {
  return guard([&] {
    require(spec && out, "null argument");
    auto r = std::make_unique<sgf_bench_report>();
    r->report = bench::run_bench(bench_spec_of(*spec));
    *out = r.release();
  });
}

void sgf_bench_report_destroy(sgf_bench_report* report) { delete report; }

sgf_status sgf_bench_report_class(const sgf_bench_report* report, const char* cls, uint64_t* exec_count,
                                  double* total_ms) {
  return guard([&] {
    require(report && cls, "null argument");
    const auto& c = report->report.cls(cls);
    if (exec_count) *exec_count = c.exec_count;
    if (total_ms) *total_ms = c.total_ms;
  });
}

double sgf_bench_report_overhead_pct(const sgf_bench_report* report) {
  return report ? report->report.overhead_pct() : 0.0;
}

double sgf_bench_report_run_time_ms(const sgf_bench_report* report) {
  return report ? report->report.run_time_ms : 0.0;
}

namespace {

std::vector<bench::OverheadReport> collect(const sgf_bench_report* const* reports, size_t n) {
  require(reports != nullptr || n == 0, "null report list");
  std::vector<bench::OverheadReport> v;
  for (size_t i = 0; i < n; ++i) {
    require(reports[i] != nullptr, "null report");
    v.push_back(reports[i]->report);
  }
  return v;
}

}  // namespace

sgf_status sgf_bench_markdown(const sgf_bench_report* const* reports, size_t n, char** out) {
  return guard([&] {
    require(out != nullptr, "null output");
    *out = dup_string(bench::report_markdown(collect(reports, n)));
  });
}

sgf_status sgf_bench_csv(const sgf_bench_report* const* reports, size_t n, char** out) {
  return guard([&] {
    require(out != nullptr, "null output");
    *out = dup_string(bench::report_csv(collect(reports, n)));
  });
}

sgf_status sgf_bench_sweep_csv(const sgf_bench_spec* base, const double* durations_us, size_t n, char** out) {
  return guard([&] {
    require(base && out && (durations_us || n == 0), "null argument");
    const bench::BenchSpec b = bench_spec_of(*base);
    const std::vector<double> d(durations_us, durations_us + n);
    *out = dup_string(bench::sweep_csv(b.benchmark, bench::sweep_overhead(b, d)));
  });
}

sgf_status sgf_bench_floor(size_t elem_count, uint64_t invocations, sgf_floor* out) {
  return guard([&] {
    require(out != nullptr, "null output");
    const bench::FloorReport f = bench::measure_floor(elem_count, invocations);
    *out = {f.elem_count, f.invocations, f.wrapper_ns, f.select_ns, f.commute_ns, f.iterate_ns, f.clock_read_ns};
  });
}

sgf_status sgf_bench_pipeline(const sgf_pipeline_bench* spec, double* frames_per_second) {
  return guard([&] {
    require(spec && frames_per_second, "null argument");
    bench::PipelineBenchSpec s;
    s.frame_bytes = spec->frame_bytes;
    s.replicas = spec->replicas;
    s.frames = spec->frames;
    s.capacity = spec->capacity;
    s.copy_mode = spec->copyless ? CopyMode::copyless : CopyMode::deep_copy;
    s.wait_mode = spec->active_wait ? WaitMode::active : WaitMode::passive;
    s.stage_us = spec->stage_us;
    *frames_per_second = bench::run_pipeline_bench(s).fps;
  });
}

void sgf_demo_config_default(sgf_demo_config* cfg) {
  if (cfg == nullptr) return;
  const demo::ChainConfig d;
  cfg->k = d.k;
  cfg->rep = d.rep;
  cfg->ebn0_db = d.ebn0_db;
  cfg->noiseless = 0;
  cfg->seed = d.seed;
  cfg->frames = d.frames;
  cfg->decode_workers = 3;
  cfg->capacity = 4;
  cfg->copyless = 1;
}

sgf_status sgf_demo_run(const sgf_demo_config* cfg, const char* plan_path, sgf_demo_result* out) {
  return guard([&] {
    require(cfg && out, "null argument");
    const demo::ChainConfig c = chain_config_of(*cfg);
    demo::Chain chain(c);
    std::optional<PipelinePlan> plan;
    if (plan_path != nullptr) {
      if (plan_path[0] == '\0') {
        plan = chain.default_plan(cfg->decode_workers, cfg->capacity,
                                  cfg->copyless ? CopyMode::copyless : CopyMode::deep_copy);
      } else {
        const auto mods = chain.modules();
        plan = load_plan_file(plan_path, mods);
      }
    }
    const demo::ChainResult r = demo::run_chain(chain, plan);
    std::string summary = demo::summary_line(c, r);
    std::string csv = r.stages ? r.stages->csv(double(c.k)) : std::string();
    *out = {};
    out->frames = r.frames;
    out->frame_errors = r.frame_errors;
    out->bit_errors = r.bit_errors;
    out->fer = r.fer;
    out->ber = r.ber;
    out->wall_s = r.wall_s;
    out->throughput_mbps = r.throughput_mbps;
    out->sink_hash = r.sink_hash;
    out->summary = dup_string(summary);
    out->stage_csv = r.stages ? dup_string(csv) : nullptr;
  });
}

sgf_status sgf_demo_default_plan(const sgf_demo_config* cfg, char** out) {
  return guard([&] {
    require(cfg && out, "null argument");
    demo::Chain chain(chain_config_of(*cfg));
    *out = dup_string(plan_to_json(chain.default_plan(cfg->decode_workers, cfg->capacity,
                                                      cfg->copyless ? CopyMode::copyless : CopyMode::deep_copy)));
  });
}

}  // extern "C"
