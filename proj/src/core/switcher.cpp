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

#include "sigflow/switcher.hpp"

#include <string>

namespace sigflow {

Switcher::Switcher(std::string name, std::size_t paths, ElemKind kind, std::size_t count)
    : CloneableModule(std::move(name)), paths_(paths), selected_(paths ? paths - 1 : 0) {
  if (paths == 0) throw Error(Errc::invalid_argument, "a switcher needs at least one path");

  Task& com = create_task("commute", TaskKind::commute);
  com.create_input("data", kind, count);
  com.create_input<std::int32_t>("ctrl", 1);
  for (std::size_t p = 0; p < paths; ++p) com.create_output("out" + std::to_string(p), kind, count);
  com.set_auto_generation(false);
  com.set_codelet(make_codelet<Switcher>([](Switcher& sw, Task& t) {
    const std::int32_t ctrl = t.in<std::int32_t>(1)[0];
    if (ctrl < 0 || static_cast<std::size_t>(ctrl) >= sw.paths_)
      throw Error(Errc::path_out_of_range,
                  "control value " + std::to_string(ctrl) + " outside [0, " + std::to_string(sw.paths_) + ")");
    const auto path = static_cast<std::size_t>(ctrl);
    sw.selected_ = path;
    SocketAccess::forward(t.output(path), t.in_frame(0));
    return TaskStatus::path(path);
  }));

  Task& sel = create_task("select", TaskKind::select);
  for (std::size_t p = 0; p < paths; ++p) sel.create_input("in" + std::to_string(p), kind, count);
  sel.create_output("out", kind, count);
  sel.set_auto_generation(false);
  sel.set_codelet(make_codelet<Switcher>([](Switcher& sw, Task& t) {
    const std::size_t path = sw.selected_;
    const Socket& in = t.input(path);
    if (in.source() == nullptr)
      throw Error(Errc::selected_input_empty, "selected input " + std::to_string(path) + " has no producer");
    SocketAccess::forward(t.output(0), in.frame());
    return TaskStatus::path(path);
  }));
}

namespace {

void add_control_task(Module& m, std::optional<SocketShape> input) {
  Task& t = m.create_task("iterate", TaskKind::control);
  if (input) t.create_input("in", input->kind, input->count);
  t.create_output<std::int32_t>("ctrl", 1);
}

}  // namespace

ForLoopControl::ForLoopControl(std::string name, std::size_t iterations, std::optional<SocketShape> input)
    : CloneableModule(std::move(name)), iterations_(iterations) {
  if (iterations == 0) throw Error(Errc::invalid_argument, "a for loop needs at least one iteration");
  add_control_task(*this, input);
  iterate().set_codelet(make_codelet<ForLoopControl>([](ForLoopControl& c, Task& t) {
    auto out = t.out<std::int32_t>(0);
    if (c.done_ < c.iterations_) {
      ++c.done_;
      out[0] = 0;
    } else {
      c.done_ = 0;
      out[0] = 1;
    }
    return TaskStatus::ok();
  }));
}

CyclicControl::CyclicControl(std::string name, std::size_t paths, std::optional<SocketShape> input)
    : CloneableModule(std::move(name)), paths_(paths) {
  if (paths == 0) throw Error(Errc::invalid_argument, "cyclic control needs at least one path");
  add_control_task(*this, input);
  iterate().set_codelet(make_codelet<CyclicControl>([](CyclicControl& c, Task& t) {
    t.out<std::int32_t>(0)[0] = static_cast<std::int32_t>(c.next_);
    c.next_ = (c.next_ + 1) % c.paths_;
    return TaskStatus::ok();
  }));
}

std::unique_ptr<ForLoopControl> make_for_control(std::string name, std::size_t iterations,
                                                 std::optional<SocketShape> input) {
  return std::make_unique<ForLoopControl>(std::move(name), iterations, input);
}

}  // namespace sigflow
