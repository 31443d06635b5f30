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
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sigflow/graph.hpp"
#include "sigflow/sequence.hpp"

namespace sigflow {

struct CloneSpec {
  std::size_t replica_count = 1;
  /// Optional execution unit per replica.
  std::vector<int> pinning;
};

/// Clones `m`; throws not_cloneable for sequential_only modules.
std::unique_ptr<Module> clone_module(const Module& m);

/// Deep copy of a set of tasks: every owning module is cloned, bindings
/// between copied tasks are reproduced in the original binding order, and
/// inputs fed from outside the set keep their original (read-only) source.
class RegionClone {
 public:
  /// When `unit` is set the module copies are made on a thread pinned to it
  /// so that fresh allocations land near the worker that will use them.
  static RegionClone make(std::span<Task* const> tasks, std::optional<int> unit = std::nullopt);

  /// Clones the modules only; call bind_like() afterwards (single-threaded).
  static RegionClone copy_modules(std::span<Task* const> tasks);
  void bind_like(std::span<Task* const> tasks);

  Task& map(const Task& original) const;
  bool contains(const Task& original) const noexcept { return forward_.count(&original) != 0; }
  const Task* original_of(const Task& clone) const noexcept;
  std::vector<std::unique_ptr<Module>>& modules() noexcept { return modules_; }
  const std::vector<std::unique_ptr<Module>>& modules() const noexcept { return modules_; }

 private:
  std::vector<std::unique_ptr<Module>> modules_;
  std::unordered_map<const Task*, Task*> forward_;
  std::unordered_map<const Task*, const Task*> backward_;
};

class Replica {
 public:
  Replica(RegionClone clone, Sequence sequence) : clone_(std::move(clone)), sequence_(std::move(sequence)) {}

  Sequence& sequence() noexcept { return sequence_; }
  const Sequence& sequence() const noexcept { return sequence_; }
  const RegionClone& region() const noexcept { return clone_; }
  /// Provenance: replica task -> original task.
  const Task* original_of(const Task& t) const noexcept { return clone_.original_of(t); }
  Task& map(const Task& original) const { return clone_.map(original); }

 private:
  RegionClone clone_;
  Sequence sequence_;
};

/// Independent deep copies of one sequence, one worker each.
class ReplicaSet {
 public:
  ReplicaSet() = default;
  ReplicaSet(std::vector<std::unique_ptr<Replica>> replicas, std::vector<int> pinning)
      : replicas_(std::move(replicas)), pinning_(std::move(pinning)) {}

  std::size_t size() const noexcept { return replicas_.size(); }
  Replica& operator[](std::size_t i) { return *replicas_.at(i); }
  const Replica& operator[](std::size_t i) const { return *replicas_.at(i); }
  const std::vector<int>& pinning() const noexcept { return pinning_; }

  /// Runs every replica on its own worker until its stop condition (called
  /// with the replica index, from that replica's worker) returns true. A
  /// failure in one replica stops the others and is rethrown.
  std::vector<ExecStats> exec(const std::function<bool(std::size_t)>& stop);

  /// Writable storage (output buffers, module resources, module objects)
  /// reachable from more than one replica. Empty when replicas are isolated.
  std::vector<std::string> isolation_audit() const;

 private:
  std::vector<std::unique_ptr<Replica>> replicas_;
  std::vector<int> pinning_;
};

/// Throws not_cloneable (naming the module and one of its tasks) when the
/// sequence holds a module that cannot be cloned, pinning_invalid for bad
/// execution units. The original sequence is left untouched.
ReplicaSet duplicate_sequence(const Sequence& seq, const CloneSpec& spec);

/// Fails with not_cloneable when any task in `tasks` belongs to a module that
/// cannot be cloned.
void require_cloneable(std::span<Task* const> tasks, const std::string& context);

}  // namespace sigflow
