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

#include <span>
#include <string>

#include "sigflow/pipeline.hpp"

namespace sigflow {

/// Parses a JSON pipeline plan. Tasks are named "module.task" and looked up
/// among `modules`. Example:
///
///   {"stages": [{"first": ["src.generate"], "last": ["chan.add_noise"]},
///               {"first": ["dec.decode"], "workers": 3, "pinning": [1, 2, 3]}],
///    "buffer_capacity": 4, "wait_mode": "passive", "copy_mode": "copyless"}
///
/// Throws invalid_argument for malformed text or unknown names.
PipelinePlan parse_plan(const std::string& json_text, std::span<Module* const> modules);
/// Reads and parses a plan file; io_error when it cannot be read.
PipelinePlan load_plan_file(const std::string& path, std::span<Module* const> modules);
/// Inverse of parse_plan.
std::string plan_to_json(const PipelinePlan& plan);

/// Looks up "module.task" (split at the last dot).
Task& resolve_task(const std::string& qualified, std::span<Module* const> modules);

}  // namespace sigflow
