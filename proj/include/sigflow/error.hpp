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

#include <cstdint>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>

namespace sigflow {

/// Error categories raised by the runtime. The numeric values are mirrored by
/// the C API status codes and must stay stable.
enum class Errc : int {
  already_bound = 1,
  type_mismatch,
  self_bind,
  unbound_input,
  task_failure,
  cycle,
  unreachable,
  dangling_input,
  path_out_of_range,
  selected_input_empty,
  not_cloneable,
  pinning_invalid,
  bad_partition,
  capacity_zero,
  shutdown,
  spec_inconsistent,
  invalid_argument,
  io_error,
};

const char* to_string(Errc code) noexcept;

/// Runtime failure. `subject` carries the id of the task or module the error
/// is about, when there is one.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::uint64_t> subject = std::nullopt);

  Errc code() const noexcept { return code_; }
  std::optional<std::uint64_t> subject() const noexcept { return subject_; }

 private:
  Errc code_;
  std::optional<std::uint64_t> subject_;
};

/// Thrown from a task body to stop the current sequence pass and restart at
/// the first task. Not an error: the engine turns it into TaskStatus::abort.
class AbortSignal : public std::exception {
 public:
  const char* what() const noexcept override { return "sequence abort"; }
};

}  // namespace sigflow
