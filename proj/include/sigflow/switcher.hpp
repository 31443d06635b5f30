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
#include <optional>

#include "sigflow/graph.hpp"

namespace sigflow {

/// Two-task control-flow module.
///
/// `commute` has inputs {data, ctrl} and k outputs; it exposes the data frame
/// on output #ctrl (no element copy) and records ctrl as the selected path.
/// `select` has k inputs and one output; it exposes the frame of input
/// #selected_path. Both tasks share the selected path, which starts at k-1.
///
/// Loop: select -> control -> commute, path 0 is the body feeding back into
/// select input 0, path 1 exits. Switch: control -> commute -> k paths ->
/// select.
class Switcher : public CloneableModule<Switcher> {
 public:
  Switcher(std::string name, std::size_t paths, ElemKind kind, std::size_t count);

  std::size_t path_count() const noexcept { return paths_; }
  std::size_t selected_path() const noexcept { return selected_; }
  void reset() noexcept { selected_ = paths_ - 1; }

  Task& commute() const { return task(0); }
  Task& select() const { return task(1); }

  Socket& commute_data() const { return commute().input(0); }
  Socket& commute_ctrl() const { return commute().input(1); }
  Socket& commute_out(std::size_t path) const { return commute().output(path); }
  Socket& select_in(std::size_t path) const { return select().input(path); }
  Socket& select_out() const { return select().output(0); }

  void on_abort_restart() override { reset(); }

 protected:
  /// Clones start from the initial path.
  void deep_copy(const Module&) override { reset(); }

 private:
  std::size_t paths_;
  std::size_t selected_;
};

/// Shape of a control task's (ignored) data input.
struct SocketShape {
  ElemKind kind;
  std::size_t count;
};

/// for-loop control: emits path 0 (body) `iterations` times, then path 1
/// (exit) once, then starts over. Its input only orders it after the data it
/// follows.
class ForLoopControl : public CloneableModule<ForLoopControl> {
 public:
  ForLoopControl(std::string name, std::size_t iterations, std::optional<SocketShape> input);

  Task& iterate() const { return task(0); }
  Socket& ctrl() const { return task(0).output(0); }
  std::size_t iterations() const noexcept { return iterations_; }
  std::size_t done() const noexcept { return done_; }

  void on_abort_restart() override { done_ = 0; }

 private:
  std::size_t iterations_;
  std::size_t done_ = 0;
};

/// Cyclic path selection 0,1,...,k-1,0,1,...
class CyclicControl : public CloneableModule<CyclicControl> {
 public:
  CyclicControl(std::string name, std::size_t paths, std::optional<SocketShape> input);

  Task& iterate() const { return task(0); }
  Socket& ctrl() const { return task(0).output(0); }

  void on_abort_restart() override { next_ = 0; }

 private:
  std::size_t paths_;
  std::size_t next_ = 0;
};

/// Builds a for-loop control task module; `iterations` must be positive.
std::unique_ptr<ForLoopControl> make_for_control(std::string name, std::size_t iterations,
                                                 std::optional<SocketShape> input = std::nullopt);

}  // namespace sigflow
