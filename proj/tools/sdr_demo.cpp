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


// Toy radio link: transmitter, AWGN channel and receiver in one process,
// run sequentially or as a pipeline.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sigflow/sigflow.h"

int main(int argc, char** argv) {
  CLI::App app{"sigflow software radio demo"};
  sgf_demo_config cfg;
  sgf_demo_config_default(&cfg);
  std::string plan;
  std::string csv_path;
  bool sequential = false;
  bool print_plan = false;
  bool deep_copy = false;

  app.add_option("--k", cfg.k, "information bits per frame")->check(CLI::PositiveNumber);
  app.add_option("--rep", cfg.rep, "repetition factor (odd)")->check(CLI::PositiveNumber);
  app.add_option("--ebn0", cfg.ebn0_db, "Eb/N0 in dB");
  app.add_option("--frames", cfg.frames, "frames to process");
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--plan", plan, "pipeline plan file (JSON); default: built-in four-stage plan");
  app.add_option("--workers", cfg.decode_workers, "decode stage replicas for the built-in plan")
      ->check(CLI::PositiveNumber);
  app.add_option("--capacity", cfg.capacity, "adaptor capacity for the built-in plan");
  app.add_option("--csv", csv_path, "per-stage statistics CSV");
  app.add_flag("--noiseless", cfg.noiseless, "bypass the noise generator");
  app.add_flag("--deep-copy", deep_copy, "copy frames between stages of the built-in plan");
  app.add_flag("--sequential", sequential, "run without a pipeline");
  app.add_flag("--print-plan", print_plan, "print the built-in plan as JSON and exit");
  CLI11_PARSE(app, argc, argv);
  cfg.copyless = deep_copy ? 0 : 1;

  if (print_plan) {
    char* text = nullptr;
    if (sgf_status st = sgf_demo_default_plan(&cfg, &text); st != SGF_OK) {
      std::cerr << "sdr-demo: " << sgf_status_name(st) << ": " << sgf_last_error_message() << '\n';
      return 1;
    }
    std::cout << text << '\n';
    sgf_string_free(text);
    return 0;
  }

  sgf_demo_result r;
  const char* plan_arg = sequential ? nullptr : plan.c_str();
  if (sgf_status st = sgf_demo_run(&cfg, plan_arg, &r); st != SGF_OK) {
    std::cerr << "sdr-demo: " << sgf_status_name(st) << ": " << sgf_last_error_message() << '\n';
    return 1;
  }
  std::cout << r.summary << '\n';
  int rc = 0;
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    out << (r.stage_csv ? r.stage_csv : "");
    if (!out) {
      std::cerr << "sdr-demo: cannot write " << csv_path << '\n';
      rc = 1;
    }
  }
  sgf_string_free(r.summary);
  sgf_string_free(r.stage_csv);
  return rc;
}
