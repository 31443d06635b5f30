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

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigflow/adaptor.hpp"
#include "sigflow/graph.hpp"
#include "sigflow/sequence.hpp"

namespace sigflow::bench {

/// Busy-waits for the configured duration by polling the monotonic clock. A
/// zero duration returns immediately without reading the clock.
void active_wait_ns(std::uint64_t ns) noexcept;

/// One compute task "compute" passing a frame through (no copy, no
/// allocation) after an active wait.
class ComputeModule : public CloneableModule<ComputeModule> {
 public:
  ComputeModule(std::string name, double duration_us, ElemKind kind, std::size_t elems, bool has_input);

  Task& compute() const { return task(0); }
  Socket& in() const { return task(0).input(0); }
  Socket& out() const { return task(0).output(task(0).output_count() - 1); }
  double duration_us() const noexcept { return double(duration_ns_) / 1000.0; }

 private:
  std::uint64_t duration_ns_;
};

/// Task "emit" with a single output that is never executed by the
/// benchmarks; it stands for data produced before the measured region.
class Initializer : public CloneableModule<Initializer> {
 public:
  Initializer(std::string name, ElemKind kind, std::size_t elems);
  Task& emit() const { return task(0); }
  Socket& out() const { return task(0).output(0); }
};

enum class Benchmark : std::uint8_t { mb1 = 1, mb2, mb3, mb4 };
std::string_view to_string(Benchmark b) noexcept;

struct BenchSpec {
  Benchmark benchmark = Benchmark::mb1;
  double task_duration_us = 4.0;
  std::uint64_t total_compute_tasks = 1'125'000;
  std::size_t runs = 5;
  std::optional<int> pin;
  /// Elements per frame on every socket.
  std::size_t elem_count = 1;
  bool task_timing = true;
};

/// Passes needed for spec.total_compute_tasks; throws spec_inconsistent when
/// the total does not divide evenly over the benchmark's structure.
std::uint64_t pass_count(const BenchSpec& spec);
/// Compute tasks executed per pass (average for MB4).
double compute_per_pass(Benchmark b) noexcept;

/// A built benchmark graph.
class BenchGraph {
 public:
  static BenchGraph build(Benchmark b, double task_duration_us, std::size_t elem_count = 1);

  Sequence& sequence() { return *sequence_; }
  const std::vector<std::unique_ptr<Module>>& modules() const noexcept { return modules_; }

 private:
  std::vector<std::unique_ptr<Module>> modules_;
  std::unique_ptr<Sequence> sequence_;
};

struct ClassCount {
  std::string name;  // "C", "select", "commute", "iterate"
  std::uint64_t exec_count = 0;
  double total_ms = 0.0;
};

struct OverheadReport {
  Benchmark benchmark = Benchmark::mb1;
  double task_duration_us = 0.0;
  std::uint64_t passes = 0;
  std::vector<ClassCount> classes;
  double run_time_ms = 0.0;
  double theoretical_ms = 0.0;
  /// run_time - theoretical - sum of class overheads.
  double other_ms = 0.0;
  std::vector<double> run_times_ms;

  const ClassCount& cls(std::string_view name) const;
  /// Time spent in a class beyond its useful compute.
  double class_overhead_ms(const ClassCount& c) const;
  double overhead_pct() const noexcept {
    return theoretical_ms > 0 ? 100.0 * (run_time_ms - theoretical_ms) / theoretical_ms : 0.0;
  }
};

/// Runs spec.runs times; returns the run with the median run time.
OverheadReport run_bench(const BenchSpec& spec);

std::string report_markdown(std::span<const OverheadReport> reports);
std::string report_csv(std::span<const OverheadReport> reports);

struct SweepPoint {
  double duration_us = 0.0;
  double run_time_ms = 0.0;
  double theoretical_ms = 0.0;
  double overhead_pct = 0.0;
};

/// One median-of-runs benchmark per duration. Zero durations are reported
/// with overhead_pct 0 (floor only).
std::vector<SweepPoint> sweep_overhead(BenchSpec base, std::span<const double> durations_us);
std::string sweep_csv(Benchmark b, std::span<const SweepPoint> points);

struct FloorReport {
  std::size_t elem_count = 0;
  std::uint64_t invocations = 0;
  double wrapper_ns = 0.0;
  double select_ns = 0.0;
  double commute_ns = 0.0;
  double iterate_ns = 0.0;
  double clock_read_ns = 0.0;
};

/// Median per-invocation cost of each task class with timing disabled.
/// `invocations` is split into 10 batches; the median batch mean is kept.
FloorReport measure_floor(std::size_t elem_count, std::uint64_t invocations = 1'000'000);
std::string floor_csv(std::span<const FloorReport> floors);

struct PipelineBenchSpec {
  std::size_t frame_bytes = 64 * 1024;
  std::size_t replicas = 2;
  std::uint64_t frames = 2000;
  std::size_t capacity = 2;
  CopyMode copy_mode = CopyMode::deep_copy;
  WaitMode wait_mode = WaitMode::passive;
  /// Active wait inside the replicated stage, per frame.
  double stage_us = 0.0;
};

struct PipelineBenchResult {
  double fps = 0.0;
  double wall_s = 0.0;
  std::uint64_t frames = 0;
};

/// Three stages: a singular source filling frames, a replicated stage that
/// reads each frame (plus an optional active wait), a singular sink.
PipelineBenchResult run_pipeline_bench(const PipelineBenchSpec& spec);

}  // namespace sigflow::bench
