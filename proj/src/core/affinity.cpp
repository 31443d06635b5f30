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

#include "sigflow/affinity.hpp"

#include <string>
#include <thread>

#include "sigflow/error.hpp"

#if defined(__linux__)
#include <pthread.h>
#include <sched.h>
#endif

namespace sigflow {

std::size_t available_execution_units() noexcept {
#if defined(__linux__)
  cpu_set_t set;
  CPU_ZERO(&set);
  if (sched_getaffinity(0, sizeof(set), &set) == 0) {
    const int n = CPU_COUNT(&set);
    if (n > 0) return static_cast<std::size_t>(n);
  }
#endif
  const unsigned n = std::thread::hardware_concurrency();
  return n ? n : 1;
}

void validate_pinning(std::span<const int> units, std::size_t expected) {
  if (expected != 0 && !units.empty() && units.size() != expected)
    throw Error(Errc::pinning_invalid, "pinning lists " + std::to_string(units.size()) + " units for " +
                                           std::to_string(expected) + " workers");
  const std::size_t avail = available_execution_units();
  for (int u : units) {
    if (u < 0 || static_cast<std::size_t>(u) >= avail)
      throw Error(Errc::pinning_invalid,
                  "execution unit " + std::to_string(u) + " outside [0, " + std::to_string(avail) + ")");
  }
}

bool pin_current_thread(int unit) noexcept {
#if defined(__linux__)
  // Map the logical index onto the process's allowed CPU set.
  cpu_set_t allowed;
  CPU_ZERO(&allowed);
  if (sched_getaffinity(0, sizeof(allowed), &allowed) != 0) return false;
  int seen = -1;
  for (int cpu = 0; cpu < CPU_SETSIZE; ++cpu) {
    if (!CPU_ISSET(cpu, &allowed)) continue;
    if (++seen == unit) {
      cpu_set_t one;
      CPU_ZERO(&one);
      CPU_SET(cpu, &one);
      return pthread_setaffinity_np(pthread_self(), sizeof(one), &one) == 0;
    }
  }
  return false;
#else
  (void)unit;
  return false;
#endif
}

}  // namespace sigflow
