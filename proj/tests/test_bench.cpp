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


#include <gtest/gtest.h>

#include <chrono>

#include "sigflow/bench.hpp"

namespace sigflow::bench {
namespace {

BenchSpec ci(Benchmark b, double us = 0.0) {
  BenchSpec s;
  s.benchmark = b;
  s.task_duration_us = us;
  s.total_compute_tasks = 11'250;
  s.runs = 1;
  return s;
}

TEST(PassCount, DefaultSpec) {
  BenchSpec s;
  const std::pair<Benchmark, std::uint64_t> want[] = {
      {Benchmark::mb1, 375'000}, {Benchmark::mb2, 37'500}, {Benchmark::mb3, 37'500}, {Benchmark::mb4, 562'500}};
  for (auto [b, passes] : want) {
    s.benchmark = b;
    EXPECT_EQ(pass_count(s), passes) << to_string(b);
  }
  EXPECT_DOUBLE_EQ(compute_per_pass(Benchmark::mb1), 3.0);
  EXPECT_DOUBLE_EQ(compute_per_pass(Benchmark::mb2), 30.0);
  EXPECT_DOUBLE_EQ(compute_per_pass(Benchmark::mb3), 30.0);
  EXPECT_DOUBLE_EQ(compute_per_pass(Benchmark::mb4), 2.0);
}

TEST(PassCount, InconsistentTotals) {
  const std::pair<Benchmark, std::uint64_t> bad[] = {
      {Benchmark::mb1, 1000}, {Benchmark::mb2, 3003}, {Benchmark::mb3, 45}, {Benchmark::mb4, 9}};
  for (auto [b, total] : bad) {
    BenchSpec s;
    s.benchmark = b;
    s.total_compute_tasks = total;
    try {
      pass_count(s);
      FAIL() << to_string(b);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::spec_inconsistent);
    }
    EXPECT_THROW(run_bench(s), Error);
  }
}

TEST(RunBench, MB1ThreePassesOfZeroMicroseconds) {
  BenchSpec s = ci(Benchmark::mb1);
  s.total_compute_tasks = 9;
  const OverheadReport r = run_bench(s);
  EXPECT_EQ(r.passes, 3u);
  EXPECT_EQ(r.cls("C").exec_count, 9u);
  EXPECT_EQ(r.theoretical_ms, 0.0);
  EXPECT_GT(r.run_time_ms, 0.0);
  EXPECT_EQ(r.overhead_pct(), 0.0);
}

// Counts at 1/100 of the default total, derived from each structure: MB1
// three chained tasks; MB2 a 10-iteration loop (11 head runs per pass); MB3
// 2 x 5 nested loops (3 + 12 control runs per pass); MB4 a 3-way switch
// whose paths carry 3, 2 and 1 tasks.
TEST(RunBench, ScaledCountsAreExact) {
  struct Want {
    Benchmark b;
    std::uint64_t passes, c, sel, com, iter;
  };
  const Want want[] = {
      {Benchmark::mb1, 3750, 11250, 0, 0, 0},
      {Benchmark::mb2, 375, 11250, 375 * 11, 375 * 11, 375 * 11},
      {Benchmark::mb3, 375, 11250, 375 * 15, 375 * 15, 375 * 15},
      {Benchmark::mb4, 5625, 11250, 5625, 5625, 5625},
  };
  for (const auto& w : want) {
    const OverheadReport r = run_bench(ci(w.b));
    EXPECT_EQ(r.passes, w.passes) << to_string(w.b);
    EXPECT_EQ(r.cls("C").exec_count, w.c) << to_string(w.b);
    EXPECT_EQ(r.cls("select").exec_count, w.sel) << to_string(w.b);
    EXPECT_EQ(r.cls("commute").exec_count, w.com) << to_string(w.b);
    EXPECT_EQ(r.cls("iterate").exec_count, w.iter) << to_string(w.b);
  }
}

TEST(RunBench, ResidualAccounting) {
  BenchSpec s = ci(Benchmark::mb2, 2.0);
  s.runs = 3;
  const OverheadReport r = run_bench(s);
  ASSERT_EQ(r.run_times_ms.size(), 3u);
  double sum = r.theoretical_ms + r.other_ms;
  for (const auto& c : r.classes) sum += r.class_overhead_ms(c);
  EXPECT_NEAR(sum, r.run_time_ms, 1e-6);
  EXPECT_NEAR(r.theoretical_ms, 11250 * 2.0 / 1000.0, 1e-9);
  EXPECT_GE(r.run_time_ms, r.theoretical_ms);
  EXPECT_THROW(r.cls("nope"), Error);
}

TEST(ActiveWait, WaitsAtLeastTheRequestedTime) {
  using clock = std::chrono::steady_clock;
  for (std::uint64_t ns : {0ull, 1000ull, 50'000ull, 200'000ull}) {
    const auto t0 = clock::now();
    active_wait_ns(ns);
    const auto took = std::uint64_t((clock::now() - t0).count());
    EXPECT_GE(took, ns);
    if (ns) EXPECT_LT(took, ns + 50'000) << ns;
  }
}

TEST(Output, MarkdownAndCsvShapes) {
  std::vector<OverheadReport> rs;
  for (auto b : {Benchmark::mb1, Benchmark::mb4}) rs.push_back(run_bench(ci(b)));
  const std::string md = report_markdown(rs);
  EXPECT_EQ(std::count(md.begin(), md.end(), '\n'), 4);
  EXPECT_NE(md.find("| MB4 |"), std::string::npos) << md;
  const std::string csv = report_csv(rs);
  EXPECT_EQ(csv.rfind("bench,task_us,passes,c_count", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Sweep, ZeroDurationIsFloorOnly) {
  BenchSpec base = ci(Benchmark::mb1);
  const double durations[] = {0.0, 1.0};
  const auto pts = sweep_overhead(base, durations);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].overhead_pct, 0.0);
  EXPECT_GT(pts[1].theoretical_ms, 0.0);
  const std::string csv = sweep_csv(Benchmark::mb1, pts);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Floor, ClassesAreCheap) {
  const FloorReport f = measure_floor(1, 100'000);
  EXPECT_EQ(f.invocations, 100'000u);
  for (double v : {f.wrapper_ns, f.select_ns, f.commute_ns, f.iterate_ns}) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1000.0);
  }
  EXPECT_GT(f.clock_read_ns, 0.0);
  const FloorReport fs[] = {f};
  const std::string csv = floor_csv(fs);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(PipelineBench, RunsAllFrames) {
  PipelineBenchSpec s;
  s.frame_bytes = 4096;
  s.frames = 300;
  for (CopyMode m : {CopyMode::deep_copy, CopyMode::copyless}) {
    s.copy_mode = m;
    const auto r = run_pipeline_bench(s);
    EXPECT_EQ(r.frames, 300u);
    EXPECT_GT(r.fps, 0.0);
  }
}

}  // namespace
}  // namespace sigflow::bench
