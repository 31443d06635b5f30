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

#include "sigflow/adaptor.hpp"

#include <chrono>
#include <thread>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace sigflow {

std::string_view to_string(WaitMode m) noexcept { return m == WaitMode::active ? "active" : "passive"; }
std::string_view to_string(CopyMode m) noexcept { return m == CopyMode::deep_copy ? "deep_copy" : "copyless"; }
std::string_view to_string(AdaptorSide s) noexcept {
  switch (s) {
    case AdaptorSide::one_to_one:
      return "1to1";
    case AdaptorSide::one_to_n:
      return "1ton";
    case AdaptorSide::n_to_one:
      return "nto1";
  }
  return "?";
}

namespace {

using clock = std::chrono::steady_clock;

inline void relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  _mm_pause();
#else
  std::this_thread::yield();
#endif
}

inline std::uint64_t elapsed_ns(clock::time_point t0) {
  return static_cast<std::uint64_t>((clock::now() - t0).count());
}

}  // namespace

Adaptor::Adaptor(std::string name, AdaptorSide side, std::size_t fanout, std::vector<ChannelShape> channels,
                 std::size_t capacity, WaitMode wait, CopyMode copy)
    : Module(std::move(name), Cloneability::sequential_only),
      side_(side),
      capacity_(capacity),
      wait_(wait),
      copy_(copy),
      channels_(std::move(channels)) {
  if (capacity == 0) throw Error(Errc::capacity_zero, "adaptor '" + this->name() + "' needs a capacity of at least 1");
  if (fanout == 0) throw Error(Errc::invalid_argument, "adaptor fanout must be positive");
  if (side == AdaptorSide::one_to_one) fanout = 1;

  lanes_.reserve(fanout);
  for (std::size_t l = 0; l < fanout; ++l) {
    auto lane = std::make_unique<Lane>();
    lane->slots.resize(capacity);
    for (auto& slot : lane->slots)
      for (const auto& ch : channels_) slot.frames.push_back(std::make_unique<FrameBuffer>(ch.kind, ch.count));
    lanes_.push_back(std::move(lane));
  }

  const std::size_t producers = producer_count();
  const std::size_t consumers = consumer_count();
  push_timing_.resize(producers);
  pull_timing_.resize(consumers);

  for (std::size_t p = 0; p < producers; ++p) {
    Task& t = create_task(producers == 1 ? "push" : "push" + std::to_string(p));
    for (const auto& ch : channels_) t.create_input(ch.name, ch.kind, ch.count);
    t.set_auto_generation(false);
    t.set_codelet([p](Module& m, Task&) {
      static_cast<Adaptor&>(m).push(p);
      return TaskStatus::ok();
    });
  }
  for (std::size_t c = 0; c < consumers; ++c) {
    Task& t = create_task(consumers == 1 ? "pull" : "pull" + std::to_string(c));
    for (const auto& ch : channels_) t.create_output(ch.name, ch.kind, ch.count);
    t.set_auto_generation(false);
    t.set_codelet([c](Module& m, Task&) {
      return static_cast<Adaptor&>(m).pull(c) ? TaskStatus::ok() : TaskStatus::abort();
    });
  }
}

Adaptor::~Adaptor() = default;

Task& Adaptor::push_task(std::size_t producer) const {
  if (producer >= producer_count()) throw Error(Errc::invalid_argument, "no such producer");
  return task(producer);
}

Task& Adaptor::pull_task(std::size_t consumer) const {
  if (consumer >= consumer_count()) throw Error(Errc::invalid_argument, "no such consumer");
  return task(producer_count() + consumer);
}

std::size_t Adaptor::lane_for_push(std::size_t producer) noexcept {
  switch (side_) {
    case AdaptorSide::one_to_n: {
      const std::size_t l = push_cursor_;
      push_cursor_ = (push_cursor_ + 1) % lanes_.size();
      return l;
    }
    case AdaptorSide::n_to_one:
      return producer;
    case AdaptorSide::one_to_one:
      break;
  }
  return 0;
}

std::size_t Adaptor::lane_for_pull(std::size_t consumer) noexcept {
  switch (side_) {
    case AdaptorSide::n_to_one: {
      const std::size_t l = pull_cursor_;
      pull_cursor_ = (pull_cursor_ + 1) % lanes_.size();
      return l;
    }
    case AdaptorSide::one_to_n:
      return consumer;
    case AdaptorSide::one_to_one:
      break;
  }
  return 0;
}

void Adaptor::signal(Lane& lane) noexcept {
  lane.events.fetch_add(1, std::memory_order_release);
  if (wait_ == WaitMode::passive) lane.events.notify_all();
}

std::uint64_t Adaptor::wait_for_space(Lane& lane, AdaptorTiming& timing) {
  const std::uint64_t tail = lane.tail.load(std::memory_order_relaxed);
  auto has_space = [&] { return tail - lane.head.load(std::memory_order_acquire) < capacity_; };
  if (has_space()) return tail;

  const auto t0 = clock::now();
  std::uint32_t spins = 0;
  for (;;) {
    const std::uint32_t seen = lane.events.load(std::memory_order_acquire);
    if (is_shut_down()) throw Error(Errc::shutdown, "pipeline stopping");
    if (has_space()) break;
    if (wait_ == WaitMode::passive) {
      lane.events.wait(seen, std::memory_order_acquire);
    } else if (++spins % 1024 == 0) {
      std::this_thread::yield();
    } else {
      relax();
    }
  }
  timing.wait_ns += elapsed_ns(t0);
  return tail;
}

std::uint64_t Adaptor::wait_for_data(Lane& lane, AdaptorTiming& timing) {
  const std::uint64_t head = lane.head.load(std::memory_order_relaxed);
  auto has_data = [&] { return lane.tail.load(std::memory_order_acquire) != head; };
  if (has_data()) return head;

  const auto t0 = clock::now();
  std::uint32_t spins = 0;
  for (;;) {
    const std::uint32_t seen = lane.events.load(std::memory_order_acquire);
    if (is_shut_down()) throw Error(Errc::shutdown, "pipeline stopping");
    if (has_data()) break;
    if (lane.closed.load(std::memory_order_acquire)) {
      if (has_data()) break;
      timing.wait_ns += elapsed_ns(t0);
      throw Error(Errc::shutdown, "end of stream");
    }
    if (wait_ == WaitMode::passive) {
      lane.events.wait(seen, std::memory_order_acquire);
    } else if (++spins % 1024 == 0) {
      std::this_thread::yield();
    } else {
      relax();
    }
  }
  timing.wait_ns += elapsed_ns(t0);
  return head;
}

void Adaptor::push(std::size_t producer) {
  Task& t = push_task(producer);
  AdaptorTiming& timing = push_timing_[producer];
  ++timing.calls;
  Lane& lane = *lanes_[lane_for_push(producer)];
  const std::uint64_t tail = wait_for_space(lane, timing);
  Slot& slot = lane.slots[tail % capacity_];

  const auto t0 = timing_ ? clock::now() : clock::time_point{};
  bool copied = false;
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    Socket* src = t.input(c).source();
    if (copy_ == CopyMode::copyless && SocketAccess::exposes_owned(*src)) {
      SocketAccess::exchange(*src, slot.frames[c]);
    } else {
      slot.frames[c]->copy_from(src->frame());
      copied = true;
    }
  }
  if (timing_ && copied) timing.copy_ns += elapsed_ns(t0);
  slot.skip = false;
  ++lane.pushed;
  lane.tail.store(tail + 1, std::memory_order_release);
  signal(lane);
}

void Adaptor::push_skip(std::size_t producer) {
  AdaptorTiming& timing = push_timing_.at(producer);
  Lane& lane = *lanes_[lane_for_push(producer)];
  const std::uint64_t tail = wait_for_space(lane, timing);
  lane.slots[tail % capacity_].skip = true;
  ++lane.skipped;
  lane.tail.store(tail + 1, std::memory_order_release);
  signal(lane);
}

bool Adaptor::pull(std::size_t consumer) {
  Task& t = pull_task(consumer);
  AdaptorTiming& timing = pull_timing_[consumer];
  ++timing.calls;
  Lane& lane = *lanes_[lane_for_pull(consumer)];
  const std::uint64_t head = wait_for_data(lane, timing);
  Slot& slot = lane.slots[head % capacity_];

  const bool real = !slot.skip;
  if (real) {
    const auto t0 = timing_ ? clock::now() : clock::time_point{};
    for (std::size_t c = 0; c < channels_.size(); ++c) {
      Socket& out = t.output(c);
      if (copy_ == CopyMode::copyless) {
        SocketAccess::exchange(out, slot.frames[c]);
      } else {
        SocketAccess::owned(out).copy_from(*slot.frames[c]);
      }
    }
    if (timing_ && copy_ == CopyMode::deep_copy) timing.copy_ns += elapsed_ns(t0);
    ++lane.pulled;
  }
  lane.head.store(head + 1, std::memory_order_release);
  signal(lane);
  return real;
}

void Adaptor::close(std::size_t producer) {
  if (side_ == AdaptorSide::n_to_one) {
    Lane& lane = *lanes_.at(producer);
    lane.closed.store(true, std::memory_order_release);
    signal(lane);
    return;
  }
  for (auto& lane : lanes_) {
    lane->closed.store(true, std::memory_order_release);
    signal(*lane);
  }
}

void Adaptor::shutdown() {
  shutdown_.store(true, std::memory_order_release);
  for (auto& lane : lanes_) {
    lane->events.fetch_add(1, std::memory_order_release);
    lane->events.notify_all();
  }
}

void Adaptor::reset() {
  for (auto& lane : lanes_) {
    lane->head.store(0);
    lane->tail.store(0);
    lane->closed.store(false);
    for (auto& slot : lane->slots) slot.skip = false;
    lane->pushed = lane->pulled = lane->skipped = 0;
  }
  for (auto& t : push_timing_) t = {};
  for (auto& t : pull_timing_) t = {};
  push_cursor_ = pull_cursor_ = 0;
  shutdown_.store(false);
}

std::uint64_t Adaptor::pushed() const noexcept {
  std::uint64_t n = 0;
  for (const auto& l : lanes_) n += l->pushed;
  return n;
}

std::uint64_t Adaptor::pulled() const noexcept {
  std::uint64_t n = 0;
  for (const auto& l : lanes_) n += l->pulled;
  return n;
}

std::uint64_t Adaptor::skipped() const noexcept {
  std::uint64_t n = 0;
  for (const auto& l : lanes_) n += l->skipped;
  return n;
}

}  // namespace sigflow
