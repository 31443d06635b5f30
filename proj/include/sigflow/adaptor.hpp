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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sigflow/graph.hpp"

namespace sigflow {

enum class WaitMode : std::uint8_t { active, passive };
enum class CopyMode : std::uint8_t { deep_copy, copyless };
enum class AdaptorSide : std::uint8_t { one_to_one, one_to_n, n_to_one };

std::string_view to_string(WaitMode m) noexcept;
std::string_view to_string(CopyMode m) noexcept;
std::string_view to_string(AdaptorSide s) noexcept;

struct ChannelShape {
  std::string name;
  ElemKind kind;
  std::size_t count;
};

struct AdaptorTiming {
  std::uint64_t calls = 0;
  std::uint64_t wait_ns = 0;
  std::uint64_t copy_ns = 0;
};

/// Producer/consumer stitch between two pipeline stages.
///
/// Buffers form a [lane][channel] array: one lane per replica on the
/// replicated side (a single lane for 1->1), each lane a bounded ring of
/// `capacity` slots holding one frame per channel. Every lane has exactly one
/// producer and one consumer, so push(1->n) and pull(n->1) walk the lanes
/// round-robin while pull(1->n) and push(n->1) each stay on their own lane.
///
/// Tasks: "push" / "pull" on the singular sides, "push<i>" / "pull<i>" on the
/// replicated side. In copyless mode frames change hands by swapping buffer
/// ownership with the neighbouring sockets instead of copying elements.
class Adaptor : public Module {
 public:
  Adaptor(std::string name, AdaptorSide side, std::size_t fanout, std::vector<ChannelShape> channels,
          std::size_t capacity, WaitMode wait, CopyMode copy);
  ~Adaptor() override;

  AdaptorSide side() const noexcept { return side_; }
  std::size_t fanout() const noexcept { return lanes_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t channel_count() const noexcept { return channels_.size(); }
  const ChannelShape& channel(std::size_t c) const { return channels_.at(c); }
  WaitMode wait_mode() const noexcept { return wait_; }
  CopyMode copy_mode() const noexcept { return copy_; }

  std::size_t producer_count() const noexcept { return side_ == AdaptorSide::n_to_one ? lanes_.size() : 1; }
  std::size_t consumer_count() const noexcept { return side_ == AdaptorSide::one_to_n ? lanes_.size() : 1; }
  Task& push_task(std::size_t producer) const;
  Task& pull_task(std::size_t consumer) const;

  /// Deposits the frames visible on push_task(producer)'s inputs. Blocks while
  /// the target slot ring is full. Throws shutdown when stopped.
  void push(std::size_t producer);
  /// Deposits a placeholder for a frame that was dropped upstream, keeping
  /// round-robin positions aligned.
  void push_skip(std::size_t producer);
  /// Fills pull_task(consumer)'s outputs. Returns false when the slot held a
  /// placeholder. Blocks while empty; throws shutdown at end of stream or when
  /// stopped.
  bool pull(std::size_t consumer);

  /// End of stream from one producer.
  void close(std::size_t producer);
  /// Wakes every waiter; further push/pull calls throw shutdown.
  void shutdown();
  /// Empties every lane and clears counters, cursors and the closed/shutdown
  /// state. Only valid while no worker uses the adaptor.
  void reset();
  bool is_shut_down() const noexcept { return shutdown_.load(std::memory_order_acquire); }

  std::size_t push_cursor() const noexcept { return push_cursor_; }
  std::size_t pull_cursor() const noexcept { return pull_cursor_; }
  std::uint64_t pushed() const noexcept;
  std::uint64_t pulled() const noexcept;
  std::uint64_t skipped() const noexcept;
  const AdaptorTiming& push_timing(std::size_t producer) const { return push_timing_.at(producer); }
  const AdaptorTiming& pull_timing(std::size_t consumer) const { return pull_timing_.at(consumer); }
  void set_timing(bool enabled) noexcept { timing_ = enabled; }

 private:
  struct Slot {
    std::vector<std::unique_ptr<FrameBuffer>> frames;
    bool skip = false;
  };
  struct Lane {
    std::vector<Slot> slots;
    alignas(64) std::atomic<std::uint64_t> head{0};
    alignas(64) std::atomic<std::uint64_t> tail{0};
    alignas(64) std::atomic<std::uint32_t> events{0};
    std::atomic<bool> closed{false};
    std::uint64_t pushed = 0;
    std::uint64_t pulled = 0;
    std::uint64_t skipped = 0;
  };

  std::size_t lane_for_push(std::size_t producer) noexcept;
  std::size_t lane_for_pull(std::size_t consumer) noexcept;
  /// Returns the slot index once a free slot exists.
  std::uint64_t wait_for_space(Lane& lane, AdaptorTiming& timing);
  /// Returns the slot index once a filled slot exists.
  std::uint64_t wait_for_data(Lane& lane, AdaptorTiming& timing);
  void signal(Lane& lane) noexcept;

  AdaptorSide side_;
  std::size_t capacity_;
  WaitMode wait_;
  CopyMode copy_;
  bool timing_ = true;
  std::vector<ChannelShape> channels_;
  std::vector<std::unique_ptr<Lane>> lanes_;
  std::vector<AdaptorTiming> push_timing_;
  std::vector<AdaptorTiming> pull_timing_;
  std::size_t push_cursor_ = 0;
  std::size_t pull_cursor_ = 0;
  std::atomic<bool> shutdown_{false};
};

}  // namespace sigflow
