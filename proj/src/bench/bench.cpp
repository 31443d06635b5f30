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

#include "sigflow/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <iomanip>
#include <sstream>
#include <thread>

#include "sigflow/affinity.hpp"
#include "sigflow/pipeline.hpp"
#include "sigflow/switcher.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace sigflow::bench {

using clock = std::chrono::steady_clock;

void active_wait_ns(std::uint64_t ns) noexcept {
  if (ns == 0) return;
  const auto t0 = clock::now();
  const auto d = std::chrono::nanoseconds(ns);
  while (clock::now() - t0 < d) {
  }
}

ComputeModule::ComputeModule(std::string name, double duration_us, ElemKind kind, std::size_t elems, bool has_input)
    : CloneableModule(std::move(name)), duration_ns_(static_cast<std::uint64_t>(duration_us * 1000.0 + 0.5)) {
  Task& t = create_task("compute");
  if (has_input) t.create_input("in", kind, elems);
  t.create_output("out", kind, elems);
  t.set_codelet(make_codelet<ComputeModule>([](ComputeModule& m, Task&) {
    active_wait_ns(m.duration_ns_);
    return TaskStatus::ok();
  }));
}

Initializer::Initializer(std::string name, ElemKind kind, std::size_t elems) : CloneableModule(std::move(name)) {
  Task& t = create_task("emit");
  t.create_output("out", kind, elems);
  t.set_codelet([](Module&, Task&) { return TaskStatus::ok(); });
}

std::string_view to_string(Benchmark b) noexcept {
  switch (b) {
    case Benchmark::mb1:
      return "MB1";
    case Benchmark::mb2:
      return "MB2";
    case Benchmark::mb3:
      return "MB3";
    case Benchmark::mb4:
      return "MB4";
  }
  return "?";
}

namespace {

// Compute tasks per structural period and passes per period.
struct Shape {
  std::uint64_t compute;
  std::uint64_t passes;
};

Shape shape_of(Benchmark b) {
  switch (b) {
    case Benchmark::mb1:
      return {3, 1};
    case Benchmark::mb2:
    case Benchmark::mb3:
      return {30, 1};
    case Benchmark::mb4:
      return {6, 3};
  }
  return {1, 1};
}

}  // namespace

double compute_per_pass(Benchmark b) noexcept {
  const Shape s = shape_of(b);
  return double(s.compute) / double(s.passes);
}

std::uint64_t pass_count(const BenchSpec& spec) {
  const Shape s = shape_of(spec.benchmark);
  if (spec.total_compute_tasks % s.compute != 0)
    throw Error(Errc::spec_inconsistent, std::string(to_string(spec.benchmark)) + " needs a multiple of " +
                                             std::to_string(s.compute) + " compute tasks, got " +
                                             std::to_string(spec.total_compute_tasks));
  return spec.total_compute_tasks / s.compute * s.passes;
}

BenchGraph BenchGraph::build(Benchmark b, double us, std::size_t elems) {
  BenchGraph g;
  const ElemKind k = ElemKind::u8;
  auto add = [&g](auto m) -> auto& {
    auto* raw = m.get();
    g.modules_.push_back(std::move(m));
    return *raw;
  };
  auto compute = [&](const std::string& name, bool has_input) -> ComputeModule& {
    return add(std::make_unique<ComputeModule>(name, us, k, elems, has_input));
  };
  // Chains n compute tasks after `from`; returns the last output.
  auto chain = [&](const std::string& prefix, std::size_t n, Socket& from, std::size_t start = 1) -> Socket& {
    Socket* prev = &from;
    for (std::size_t i = 0; i < n; ++i) {
      ComputeModule& c = compute(prefix + std::to_string(start + i), true);
      bind(c.in(), *prev);
      prev = &c.out();
    }
    return *prev;
  };

  switch (b) {
    case Benchmark::mb1: {
      ComputeModule& c1 = compute("c1", false);
      chain("c", 2, c1.out(), 2);
      g.sequence_ = std::make_unique<Sequence>(std::vector<Task*>{&c1.compute()});
      break;
    }
    case Benchmark::mb2: {
      Initializer& init = add(std::make_unique<Initializer>("init", k, elems));
      Switcher& sw = add(std::make_unique<Switcher>("loop", 2, k, elems));
      ForLoopControl& ctl = add(std::make_unique<ForLoopControl>("for", 10, SocketShape{k, elems}));
      bind(sw.select_in(1), init.out());
      bind(ctl.iterate().input(0), sw.select_out());
      bind(sw.commute_data(), sw.select_out());
      bind(sw.commute_ctrl(), ctl.ctrl());
      bind(sw.select_in(0), chain("c", 3, sw.commute_out(0)));
      g.sequence_ = std::make_unique<Sequence>(std::vector<Task*>{&sw.select()});
      break;
    }
    case Benchmark::mb3: {
      Initializer& init = add(std::make_unique<Initializer>("init", k, elems));
      Switcher& outer = add(std::make_unique<Switcher>("outer", 2, k, elems));
      ForLoopControl& octl = add(std::make_unique<ForLoopControl>("outer_for", 2, SocketShape{k, elems}));
      Switcher& inner = add(std::make_unique<Switcher>("inner", 2, k, elems));
      ForLoopControl& ictl = add(std::make_unique<ForLoopControl>("inner_for", 5, SocketShape{k, elems}));
      bind(outer.select_in(1), init.out());
      bind(octl.iterate().input(0), outer.select_out());
      bind(outer.commute_data(), outer.select_out());
      bind(outer.commute_ctrl(), octl.ctrl());
      bind(inner.select_in(1), outer.commute_out(0));
      bind(ictl.iterate().input(0), inner.select_out());
      bind(inner.commute_data(), inner.select_out());
      bind(inner.commute_ctrl(), ictl.ctrl());
      bind(inner.select_in(0), chain("c", 3, inner.commute_out(0)));
      bind(outer.select_in(0), inner.commute_out(1));
      g.sequence_ = std::make_unique<Sequence>(std::vector<Task*>{&outer.select()});
      break;
    }
    case Benchmark::mb4: {
      Initializer& init = add(std::make_unique<Initializer>("init", k, elems));
      CyclicControl& ctl = add(std::make_unique<CyclicControl>("cycle", 3, std::nullopt));
      Switcher& sw = add(std::make_unique<Switcher>("switch", 3, k, elems));
      bind(sw.commute_data(), init.out());
      bind(sw.commute_ctrl(), ctl.ctrl());
      bind(sw.select_in(0), chain("a", 3, sw.commute_out(0)));
      bind(sw.select_in(1), chain("b", 2, sw.commute_out(1)));
      bind(sw.select_in(2), chain("d", 1, sw.commute_out(2)));
      g.sequence_ = std::make_unique<Sequence>(std::vector<Task*>{&ctl.iterate()});
      break;
    }
  }
  return g;
}

const ClassCount& OverheadReport::cls(std::string_view name) const {
  for (const auto& c : classes)
    if (c.name == name) return c;
  throw Error(Errc::invalid_argument, "no task class '" + std::string(name) + "'");
}

double OverheadReport::class_overhead_ms(const ClassCount& c) const {
  if (c.name == "C") return c.total_ms - double(c.exec_count) * task_duration_us / 1000.0;
  return c.total_ms;
}

namespace {

const char* class_name(TaskKind k) {
  switch (k) {
    case TaskKind::standard:
      return "C";
    case TaskKind::select:
      return "select";
    case TaskKind::commute:
      return "commute";
    case TaskKind::control:
      return "iterate";
  }
  return "?";
}

OverheadReport run_once(const BenchSpec& spec, std::uint64_t passes) {
  BenchGraph g = BenchGraph::build(spec.benchmark, spec.task_duration_us, spec.elem_count);
  Sequence& seq = g.sequence();
  seq.set_timing(spec.task_timing);
  const ExecStats es = seq.exec_passes(passes);

  OverheadReport r;
  r.benchmark = spec.benchmark;
  r.task_duration_us = spec.task_duration_us;
  r.passes = es.passes_completed;
  for (const char* name : {"C", "select", "commute", "iterate"}) r.classes.push_back({name, 0, 0.0});
  for (Task* t : seq.tasks()) {
    for (auto& c : r.classes) {
      if (c.name != class_name(t->kind())) continue;
      c.exec_count += t->stats().exec_count;
      c.total_ms += double(t->stats().total_ns) / 1e6;
    }
  }
  r.run_time_ms = double(es.wall_ns) / 1e6;
  r.theoretical_ms = double(spec.total_compute_tasks) * spec.task_duration_us / 1000.0;
  double over = 0.0;
  for (const auto& c : r.classes) over += r.class_overhead_ms(c);
  r.other_ms = r.run_time_ms - r.theoretical_ms - over;
  return r;
}

}  // namespace

OverheadReport run_bench(const BenchSpec& spec) {
  const std::uint64_t passes = pass_count(spec);
  if (spec.runs == 0) throw Error(Errc::invalid_argument, "at least one run is needed");

  auto body = [&] {
    std::vector<OverheadReport> runs;
    for (std::size_t i = 0; i < spec.runs; ++i) runs.push_back(run_once(spec, passes));
    std::vector<double> times;
    for (const auto& r : runs) times.push_back(r.run_time_ms);
    std::sort(runs.begin(), runs.end(),
              [](const OverheadReport& a, const OverheadReport& b) { return a.run_time_ms < b.run_time_ms; });
    OverheadReport median = runs[runs.size() / 2];
    median.run_times_ms = times;
    return median;
  };

  if (!spec.pin) return body();
  validate_pinning(std::span<const int>(&*spec.pin, 1), 1);
  OverheadReport result;
  std::exception_ptr failure;
  std::thread worker([&] {
    pin_current_thread(*spec.pin);
    try {
      result = body();
    } catch (...) {
      failure = std::current_exception();
    }
  });
  worker.join();
  if (failure) std::rethrow_exception(failure);
  return result;
}

std::string report_markdown(std::span<const OverheadReport> reports) {
  std::ostringstream os;
  os << "| Bench | C count | C ms | select count | select ms | commute count | commute ms | iterate count | "
        "iterate ms | other ms | run time ms | theoretical ms | overhead % |\n";
  os << "|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  os << std::fixed;
  for (const auto& r : reports) {
    os << "| " << to_string(r.benchmark);
    for (const auto& c : r.classes) {
      if (c.exec_count == 0) {
        os << " | - | -";
      } else {
        os << " | " << c.exec_count << " | " << std::setprecision(2) << c.total_ms;
      }
    }
    os << " | " << std::setprecision(2) << r.other_ms << " | " << r.run_time_ms << " | " << r.theoretical_ms << " | "
       << std::setprecision(2) << r.overhead_pct() << " |\n";
  }
  return os.str();
}

std::string report_csv(std::span<const OverheadReport> reports) {
  std::ostringstream os;
  os << "bench,task_us,passes,c_count,c_ms,select_count,select_ms,commute_count,commute_ms,iterate_count,iterate_ms,"
        "other_ms,run_time_ms,theoretical_ms,overhead_pct\n";
  os << std::fixed << std::setprecision(4);
  for (const auto& r : reports) {
    os << to_string(r.benchmark) << ',' << r.task_duration_us << ',' << r.passes;
    for (const auto& c : r.classes) os << ',' << c.exec_count << ',' << c.total_ms;
    os << ',' << r.other_ms << ',' << r.run_time_ms << ',' << r.theoretical_ms << ',' << r.overhead_pct() << '\n';
  }
  return os.str();
}

std::vector<SweepPoint> sweep_overhead(BenchSpec base, std::span<const double> durations_us) {
  std::vector<SweepPoint> out;
  for (double d : durations_us) {
    if (d < 0) throw Error(Errc::invalid_argument, "durations must not be negative");
    base.task_duration_us = d;
    const OverheadReport r = run_bench(base);
    out.push_back({d, r.run_time_ms, r.theoretical_ms, d > 0 ? r.overhead_pct() : 0.0});
  }
  return out;
}

std::string sweep_csv(Benchmark b, std::span<const SweepPoint> points) {
  std::ostringstream os;
  os << "bench,task_us,run_time_ms,theoretical_ms,overhead_pct\n" << std::fixed << std::setprecision(4);
  for (const auto& p : points)
    os << to_string(b) << ',' << p.duration_us << ',' << p.run_time_ms << ',' << p.theoretical_ms << ','
       << p.overhead_pct << '\n';
  return os.str();
}

namespace {

constexpr std::size_t kBatches = 10;

template <class F>
double median_batch_ns(std::uint64_t invocations, F&& f) {
  const std::uint64_t per = std::max<std::uint64_t>(1, invocations / kBatches);
  for (std::uint64_t i = 0; i < per / 10 + 1; ++i) f();  // warm-up
  std::vector<double> means;
  for (std::size_t b = 0; b < kBatches; ++b) {
    const auto t0 = clock::now();
    for (std::uint64_t i = 0; i < per; ++i) f();
    means.push_back(double((clock::now() - t0).count()) / double(per));
  }
  std::nth_element(means.begin(), means.begin() + kBatches / 2, means.end());
  return means[kBatches / 2];
}

}  // namespace

FloorReport measure_floor(std::size_t elem_count, std::uint64_t invocations) {
  FloorReport r;
  r.elem_count = elem_count;
  r.invocations = std::max<std::uint64_t>(invocations, kBatches);
  const ElemKind k = ElemKind::u8;

  ComputeModule c("c", 0.0, k, elem_count, false);
  c.compute().set_timing(false);
  r.wrapper_ns = median_batch_ns(r.invocations, [&] { (void)c.compute().execute(); });

  Initializer init("init", k, elem_count);
  Switcher sw("sw", 2, k, elem_count);
  ForLoopControl ctl("for", 1'000'000'000, std::nullopt);
  bind(sw.commute_data(), init.out());
  bind(sw.commute_ctrl(), ctl.ctrl());
  bind(sw.select_in(0), sw.commute_out(0));
  bind(sw.select_in(1), init.out());
  for (std::size_t i = 0; i < sw.task_count(); ++i) sw.task(i).set_timing(false);
  ctl.iterate().set_timing(false);
  (void)ctl.iterate().execute();  // ctrl = 0

  r.iterate_ns = median_batch_ns(r.invocations, [&] { (void)ctl.iterate().execute(); });
  r.commute_ns = median_batch_ns(r.invocations, [&] { (void)sw.commute().execute(); });
  r.select_ns = median_batch_ns(r.invocations, [&] { (void)sw.select().execute(); });

  volatile std::int64_t sink = 0;
  r.clock_read_ns =
      median_batch_ns(r.invocations, [&] { sink = sink + clock::now().time_since_epoch().count(); });
  return r;
}

std::string floor_csv(std::span<const FloorReport> floors) {
  std::ostringstream os;
  os << "elem_count,invocations,wrapper_ns,select_ns,commute_ns,iterate_ns,clock_read_ns\n"
     << std::fixed << std::setprecision(2);
  for (const auto& f : floors)
    os << f.elem_count << ',' << f.invocations << ',' << f.wrapper_ns << ',' << f.select_ns << ',' << f.commute_ns
       << ',' << f.iterate_ns << ',' << f.clock_read_ns << '\n';
  return os.str();
}

namespace {

class FillModule : public CloneableModule<FillModule> {
 public:
  FillModule(std::size_t bytes) : CloneableModule("fill") {
    Task& t = create_task("fill");
    t.create_output("out", ElemKind::u8, bytes);
    t.set_codelet([](Module&, Task& t) {
      auto out = t.writable(0).bytes();
      const auto g = static_cast<unsigned char>(t.stats().exec_count);
      std::memset(out.data(), g, 64);
      return TaskStatus::ok();
    });
  }
};

class TouchModule : public CloneableModule<TouchModule> {
 public:
  TouchModule(std::size_t bytes, double us)
      : CloneableModule("touch"), wait_ns_(static_cast<std::uint64_t>(us * 1000.0)) {
    Task& t = create_task("touch");
    t.create_input("in", ElemKind::u8, bytes);
    t.create_output<std::int32_t>("sum", 1);
    t.set_codelet(make_codelet<TouchModule>([](TouchModule& m, Task& t) {
      active_wait_ns(m.wait_ns_);
      const auto in = t.in_frame(0).bytes();
      std::int32_t s = 0;
      for (std::size_t i = 0; i < 64 && i < in.size(); ++i) s += static_cast<std::int32_t>(in[i]);
      t.out<std::int32_t>(0)[0] = s;
      return TaskStatus::ok();
    }));
  }

 private:
  std::uint64_t wait_ns_;
};

class DrainModule : public CloneableModule<DrainModule> {
 public:
  DrainModule() : CloneableModule("drain") {
    Task& t = create_task("drain");
    t.create_input<std::int32_t>("in", 1);
    t.set_codelet([](Module&, Task&) { return TaskStatus::ok(); });
  }
};

}  // namespace

PipelineBenchResult run_pipeline_bench(const PipelineBenchSpec& spec) {
  FillModule fill(spec.frame_bytes);
  TouchModule touch(spec.frame_bytes, spec.stage_us);
  DrainModule drain;
  bind(touch.task(0).input(0), fill.task(0).output(0));
  bind(drain.task(0).input(0), touch.task(0).output(0));

  PipelinePlan plan;
  plan.stages = {StageSpec{{&fill.task(0)}, {&fill.task(0)}, 1, {}},
                 StageSpec{{&touch.task(0)}, {&touch.task(0)}, spec.replicas, {}},
                 StageSpec{{&drain.task(0)}, {}, 1, {}}};
  plan.buffer_capacity = spec.capacity;
  plan.copy_mode = spec.copy_mode;
  plan.wait_mode = spec.wait_mode;
  plan.task_timing = false;
  Pipeline p(std::move(plan));
  const PipelineStats st = p.exec_frames(spec.frames);
  return {st.throughput_fps, st.wall_s, st.frames_out};
}

}  // namespace sigflow::bench
