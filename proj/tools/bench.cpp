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


// Micro-benchmark driver: task-class counts and overhead tables for MB1-MB4,
// granularity sweeps, control-flow floors and adaptor throughput.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sigflow/sigflow.h"

namespace {

int fail(sgf_status st) {
  std::cerr << "bench: " << sgf_status_name(st) << ": " << sgf_last_error_message() << '\n';
  return 1;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  return static_cast<bool>(out);
}

std::string take(char* s) {
  std::string out = s ? s : "";
  sgf_string_free(s);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sigflow micro-benchmarks"};
  std::vector<int> mbs{1, 2, 3, 4};
  double task_us = 4.0;
  std::uint64_t total = 1'125'000;
  std::size_t runs = 5;
  int pin = -1;
  std::string csv_path;
  std::vector<double> sweep;
  bool floor = false;
  bool no_timing = false;
  std::size_t elems = 1;
  bool pipe = false;
  std::size_t frame_bytes = 64 * 1024;
  std::size_t replicas = 2;
  std::uint64_t frames = 2000;

  app.add_option("--mb", mbs, "benchmarks to run (1..4)")->check(CLI::Range(1, 4))->delimiter(',');
  app.add_option("--task-us", task_us, "compute task duration in microseconds")->check(CLI::NonNegativeNumber);
  app.add_option("--total", total, "compute tasks per benchmark");
  app.add_option("--runs", runs, "runs per measurement (median kept)")->check(CLI::PositiveNumber);
  app.add_option("--pin", pin, "execution unit to pin the worker to");
  app.add_option("--csv", csv_path, "write the table (or sweep/floor data) as CSV");
  app.add_option("--sweep", sweep, "task durations (us) for an overhead sweep")->delimiter(',');
  app.add_flag("--floor", floor, "measure per-invocation floors at 10^3 and 10^6 elements");
  app.add_flag("--no-timing", no_timing, "disable per-task timing");
  app.add_option("--elems", elems, "elements per frame")->check(CLI::PositiveNumber);
  app.add_flag("--pipeline", pipe, "adaptor throughput: deep_copy vs copyless");
  app.add_option("--frame-bytes", frame_bytes, "frame size for --pipeline");
  app.add_option("--replicas", replicas, "replicated stage width for --pipeline");
  app.add_option("--frames", frames, "frames for --pipeline");
  CLI11_PARSE(app, argc, argv);

  sgf_bench_spec spec;
  sgf_bench_spec_default(&spec);
  spec.task_us = task_us;
  spec.total_compute_tasks = total;
  spec.runs = runs;
  spec.pin = pin;
  spec.task_timing = no_timing ? 0 : 1;
  spec.elem_count = elems;

  if (floor) {
    std::string csv = "elem_count,invocations,wrapper_ns,select_ns,commute_ns,iterate_ns,clock_read_ns\n";
    for (std::size_t n : {std::size_t{1000}, std::size_t{1000000}}) {
      sgf_floor f;
      if (sgf_status st = sgf_bench_floor(n, 1'000'000, &f); st != SGF_OK) return fail(st);
      std::printf("elems=%zu wrapper=%.1fns select=%.1fns commute=%.1fns iterate=%.1fns clock_read=%.1fns\n",
                  f.elem_count, f.wrapper_ns, f.select_ns, f.commute_ns, f.iterate_ns, f.clock_read_ns);
      char line[256];
      std::snprintf(line, sizeof line, "%zu,%llu,%.2f,%.2f,%.2f,%.2f,%.2f\n", f.elem_count,
                    static_cast<unsigned long long>(f.invocations), f.wrapper_ns, f.select_ns, f.commute_ns,
                    f.iterate_ns, f.clock_read_ns);
      csv += line;
    }
    if (!csv_path.empty() && !write_file(csv_path, csv)) return fail(SGF_E_IO_ERROR);
    return 0;
  }

  if (pipe) {
    std::printf("frame_bytes=%zu replicas=%zu frames=%llu\n", frame_bytes, replicas,
                static_cast<unsigned long long>(frames));
    std::string csv = "copy_mode,fps\n";
    for (int copyless : {0, 1}) {
      sgf_pipeline_bench pb{frame_bytes, replicas, frames, 2, copyless, 0, 0.0};
      double fps = 0;
      if (sgf_status st = sgf_bench_pipeline(&pb, &fps); st != SGF_OK) return fail(st);
      const char* mode = copyless ? "copyless" : "deep_copy";
      std::printf("%-9s %.1f frames/s\n", mode, fps);
      csv += std::string(mode) + "," + std::to_string(fps) + "\n";
    }
    if (!csv_path.empty() && !write_file(csv_path, csv)) return fail(SGF_E_IO_ERROR);
    return 0;
  }

  if (!sweep.empty()) {
    std::string csv;
    for (int mb : mbs) {
      spec.benchmark = mb;
      char* out = nullptr;
      if (sgf_status st = sgf_bench_sweep_csv(&spec, sweep.data(), sweep.size(), &out); st != SGF_OK)
        return fail(st);
      std::string part = take(out);
      if (!csv.empty()) part = part.substr(part.find('\n') + 1);
      csv += part;
    }
    std::cout << csv;
    if (!csv_path.empty() && !write_file(csv_path, csv)) return fail(SGF_E_IO_ERROR);
    return 0;
  }

  std::vector<sgf_bench_report*> reports;
  auto release = [&] {
    for (auto* r : reports) sgf_bench_report_destroy(r);
  };
  for (int mb : mbs) {
    spec.benchmark = mb;
    sgf_bench_report* r = nullptr;
    if (sgf_status st = sgf_bench_run(&spec, &r); st != SGF_OK) {
      release();
      return fail(st);
    }
    reports.push_back(r);
  }
  char* md = nullptr;
  char* csv = nullptr;
  sgf_status st = sgf_bench_markdown(reports.data(), reports.size(), &md);
  if (st == SGF_OK) st = sgf_bench_csv(reports.data(), reports.size(), &csv);
  release();
  if (st != SGF_OK) return fail(st);
  std::cout << take(md);
  const std::string csv_text = take(csv);
  if (!csv_path.empty() && !write_file(csv_path, csv_text)) return fail(SGF_E_IO_ERROR);
  return 0;
}
