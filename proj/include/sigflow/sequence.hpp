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
#include <functional>
#include <string>
#include <vector>

#include "sigflow/graph.hpp"

namespace sigflow {

/// Returns true to stop, false to run another pass.
using StopCondition = std::function<bool()>;

enum class SubSequenceKind : std::uint8_t { plain, loop, switch_ };
std::string_view to_string(SubSequenceKind kind) noexcept;

/// Control-flow-free run of tasks; a node of the execution graph.
struct SubSequence {
  std::size_t id = 0;
  std::vector<Task*> tasks;
  SubSequenceKind kind = SubSequenceKind::plain;
  /// plain: 0 or 1 entries. loop/switch: one entry per commute path, indexed
  /// by path.
  std::vector<std::size_t> successors;
  /// Commute task whose returned path picks the successor, if any.
  Task* branch = nullptr;
};

struct ExecStats {
  std::uint64_t passes_completed = 0;
  std::uint64_t passes_aborted = 0;
  std::uint64_t stop_evaluations = 0;
  std::uint64_t wall_ns = 0;
};

struct TaskStatRow {
  std::string task;
  TaskKind kind = TaskKind::standard;
  std::uint64_t exec_count = 0;
  std::uint64_t total_ns = 0;
  double mean_ns = 0.0;
  double share_pct = 0.0;
};

struct LogEntry {
  std::uint64_t pass = 0;
  TaskId task = 0;
  bool aborted = false;
};

enum class PassOutcome : std::uint8_t { completed, aborted };

/// Static schedule of the tasks reachable from `first` (depth-first, in
/// binding order), executed repeatedly under a stop condition.
class Sequence {
 public:
  /// `excluded` tasks are never entered by the traversal (pipeline adaptors).
  Sequence(std::vector<Task*> first, std::vector<Task*> last = {}, std::vector<const Task*> excluded = {});

  Sequence(Sequence&&) noexcept = default;
  Sequence& operator=(Sequence&&) noexcept = default;
  Sequence(const Sequence&) = delete;
  Sequence& operator=(const Sequence&) = delete;

  const std::vector<Task*>& first_tasks() const noexcept { return first_; }
  const std::vector<Task*>& last_tasks() const noexcept { return last_; }
  const std::vector<SubSequence>& schedule() const noexcept { return nodes_; }
  /// Every scheduled task, in sub-sequence order.
  std::vector<Task*> tasks() const;
  /// Distinct modules owning scheduled tasks, in first-appearance order.
  std::vector<Module*> modules() const;

  /// Repeats {run a pass; evaluate stop} until stop returns true. Aborted
  /// passes restart at the first task without evaluating stop.
  ExecStats exec(const StopCondition& stop);
  /// Convenience: exactly `passes` completed passes.
  ExecStats exec_passes(std::uint64_t passes);
  /// One pass through the execution graph.
  PassOutcome run_pass();

  std::vector<TaskStatRow> stats() const;
  void reset_stats();
  /// Per-task timing; disabled timing measures the runtime floor.
  void set_timing(bool enabled);

  /// Bounded log of executed tasks per pass; capacity 0 disables it.
  void enable_log(std::size_t capacity);
  std::vector<LogEntry> log() const;

  /// Deterministic DOT dump of sub-sequences and their tasks.
  std::string dump() const;

 private:
  void reset_control_state();
  void record(TaskId task, bool aborted);

  std::vector<Task*> first_;
  std::vector<Task*> last_;
  std::vector<SubSequence> nodes_;
  std::uint64_t pass_index_ = 0;
  std::size_t log_capacity_ = 0;
  std::size_t log_head_ = 0;
  std::vector<LogEntry> log_;
};

/// Tasks a traversal from `first` schedules, without error checks on tasks
/// that never become ready. The traversal never enters `boundary` tasks.
/// Used to derive pipeline stage membership.
std::vector<Task*> collect_stage_tasks(const std::vector<Task*>& first, const std::vector<Task*>& last,
                                       const std::vector<const Task*>& boundary = {});

/// CSV with columns task,exec_count,total_ms,mean_us,share_pct.
std::string stats_csv(const std::vector<TaskStatRow>& rows);

}  // namespace sigflow
