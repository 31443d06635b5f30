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
#include <span>

namespace sigflow {

/// Execution units the process may run on (at least 1).
std::size_t available_execution_units() noexcept;

/// Throws pinning_invalid when an entry is outside [0, available units) or
/// when `expected` is non-zero and the list length differs from it.
void validate_pinning(std::span<const int> units, std::size_t expected = 0);

/// Pins the calling thread. Returns false where affinity control is not
/// supported; pinning is then a no-op.
bool pin_current_thread(int unit) noexcept;

}  // namespace sigflow
