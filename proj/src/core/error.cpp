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

#include "sigflow/error.hpp"

namespace sigflow {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::already_bound:
      return "AlreadyBound";
    case Errc::type_mismatch:
      return "TypeMismatch";
    case Errc::self_bind:
      return "SelfBind";
    case Errc::unbound_input:
      return "UnboundInput";
    case Errc::task_failure:
      return "TaskFailure";
    case Errc::cycle:
      return "Cycle";
    case Errc::unreachable:
      return "Unreachable";
    case Errc::dangling_input:
      return "DanglingInput";
    case Errc::path_out_of_range:
      return "PathOutOfRange";
    case Errc::selected_input_empty:
      return "SelectedInputEmpty";
    case Errc::not_cloneable:
      return "NotCloneable";
    case Errc::pinning_invalid:
      return "PinningInvalid";
    case Errc::bad_partition:
      return "BadPartition";
    case Errc::capacity_zero:
      return "CapacityZero";
    case Errc::shutdown:
      return "Shutdown";
    case Errc::spec_inconsistent:
      return "SpecInconsistent";
    case Errc::invalid_argument:
      return "InvalidArgument";
    case Errc::io_error:
      return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what, std::optional<std::uint64_t> subject)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), subject_(subject) {}

}  // namespace sigflow
