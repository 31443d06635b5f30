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
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "sigflow/adaptor.hpp"
#include "sigflow/graph.hpp"
#include "sigflow/replication.hpp"
#include "sigflow/sequence.hpp"

namespace sigflow {

struct StageSpec {
  std::vector<Task*> first;
  std::vector<Task*> last;
  std::size_t workers = 1;
  /// Empty, or one execution unit per worker.
  std::vector<int> pinning;
};

struct PipelinePlan {
  /// Validation anchor; must belong to the first stage.
  Task* entry = nullptr;
  std::vector<StageSpec> stages;
  std::size_t buffer_capacity = 1;
  WaitMode wait_mode = WaitMode::passive;
  CopyMode copy_mode = CopyMode::deep_copy;
  bool task_timing = true;
};

struct StageStats {
  std::size_t stage = 0;
  std::size_t workers = 1;
  std::uint64_t frames = 0;
  std::uint64_t aborted = 0;
  double busy_s = 0.0;
  double push_wait_pct = 0.0;
  double pull_wait_pct = 0.0;
  double push_copy_pct = 0.0;
  double pull_copy_pct = 0.0;
  double task_pct = 0.0;
  double other_pct = 0.0;
  double throughput_fps = 0.0;
};

struct PipelineStats {
  std::vector<StageStats> stages;
  std::uint64_t frames_out = 0;
  double wall_s = 0.0;
  double throughput_fps = 0.0;

  /// One row per stage: shares in percent plus throughput in frames/s and
  /// Mb/s for `bits_per_frame`.
  std::string csv(double bits_per_frame) const;
};

/// A task graph split into stages. Each stage runs as a sequence on its own
/// worker(s); stage boundaries are stitched by adaptors inserted at
/// construction; replicated stages are deep-copied. The original bindings are
/// restored when the pipeline is destroyed.
class Pipeline {
 public:
  explicit Pipeline(PipelinePlan plan);
  ~Pipeline();
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  /// Runs until `stop`, evaluated after each completed pass of the final
  /// stage, returns true; in-flight frames are then drained.
  PipelineStats exec(const StopCondition& stop);
  /// Runs exactly `frames` passes of the first stage, then drains.
  PipelineStats exec_frames(std::uint64_t frames);

  const PipelinePlan& plan() const noexcept { return plan_; }
  std::size_t stage_count() const noexcept { return stages_.size(); }
  std::size_t replica_count(std::size_t stage) const { return stages_.at(stage).replicas.size(); }
  Sequence& stage_sequence(std::size_t stage, std::size_t replica) const;
  /// Stage membership of the original graph, in schedule order.
  const std::vector<Task*>& stage_tasks(std::size_t stage) const { return stages_.at(stage).tasks; }
  /// The copy of `original` that runs in `replica` (the original itself for
  /// replica 0).
  Task& map(const Task& original, std::size_t replica) const;

  std::size_t adaptor_count() const noexcept { return adaptors_.size(); }
  Adaptor& adaptor(std::size_t boundary) const { return *adaptors_.at(boundary); }
  /// Names of every push/pull task added to the graph.
  std::vector<std::string> inserted_tasks() const;

  std::string dump() const;

 private:
  struct StageReplica {
    std::unique_ptr<RegionClone> clone;  // null for replica 0
    std::unique_ptr<Sequence> sequence;
  };
  struct Stage {
    std::vector<Task*> tasks;
    std::vector<StageReplica> replicas;
  };
  struct SavedSinks {
    Socket* output;
    std::vector<Socket*> sinks;
  };

  PipelineStats run(const StopCondition* stop, std::uint64_t frame_limit);
  void restore_bindings() noexcept;

  PipelinePlan plan_;
  std::vector<Stage> stages_;
  std::vector<std::unique_ptr<Adaptor>> adaptors_;
  std::vector<SavedSinks> saved_;
};

}  // namespace sigflow
