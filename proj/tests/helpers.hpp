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

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sigflow/graph.hpp"

namespace sigflow::testing {

/// Emits its pass counter as a single i32 (or `count` copies of it).
class Counter : public CloneableModule<Counter> {
 public:
  explicit Counter(std::string name = "counter", std::size_t count = 1) : CloneableModule(std::move(name)) {
    Task& t = create_task("emit");
    t.create_output<std::int32_t>("out", count);
    t.set_codelet(make_codelet<Counter>([](Counter& m, Task& t) {
      auto out = t.out<std::int32_t>(0);
      for (auto& v : out) v = m.next_;
      ++m.next_;
      return TaskStatus::ok();
    }));
  }
  Task& emit() const { return task(0); }
  std::int32_t next() const noexcept { return next_; }

 private:
  std::int32_t next_ = 0;
};

/// out = in + delta, element-wise.
class Adder : public CloneableModule<Adder> {
 public:
  Adder(std::string name, std::int32_t delta, std::size_t count = 1)
      : CloneableModule(std::move(name)), delta_(delta) {
    Task& t = create_task("add");
    t.create_input<std::int32_t>("in", count);
    t.create_output<std::int32_t>("out", count);
    t.set_codelet(make_codelet<Adder>([](Adder& m, Task& t) {
      const auto in = t.in<std::int32_t>(0);
      auto out = t.out<std::int32_t>(0);
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] + m.delta_;
      return TaskStatus::ok();
    }));
  }
  Task& add() const { return task(0); }

 private:
  std::int32_t delta_;
};

/// Records the first element and the generation of every frame it receives.
class Collector : public Module {
 public:
  explicit Collector(std::string name = "collector", std::size_t count = 1)
      : Module(std::move(name), Cloneability::sequential_only) {
    Task& t = create_task("take");
    t.create_input<std::int32_t>("in", count);
    t.set_codelet(make_codelet<Collector>([](Collector& m, Task& t) {
      m.values.push_back(t.in<std::int32_t>(0)[0]);
      m.generations.push_back(t.in_frame(0).generation());
      return TaskStatus::ok();
    }));
  }
  Task& take() const { return task(0); }

  std::vector<std::int32_t> values;
  std::vector<std::uint64_t> generations;
};

/// Pass-through task with a user predicate deciding when to abort.
class Gate : public CloneableModule<Gate> {
 public:
  Gate(std::string name, std::function<bool(std::int32_t)> abort_if, std::size_t count = 1)
      : CloneableModule(std::move(name)), abort_if_(std::move(abort_if)) {
    Task& t = create_task("pass");
    t.create_input<std::int32_t>("in", count);
    t.create_output<std::int32_t>("out", count);
    t.set_codelet(make_codelet<Gate>([](Gate& m, Task& t) {
      const auto in = t.in<std::int32_t>(0);
      if (m.abort_if_(in[0])) return TaskStatus::abort();
      auto out = t.out<std::int32_t>(0);
      std::copy(in.begin(), in.end(), out.begin());
      return TaskStatus::ok();
    }));
  }
  Task& pass() const { return task(0); }

 private:
  std::function<bool(std::int32_t)> abort_if_;
};

/// Generic task with n inputs and m outputs whose body does nothing; used to
/// build graph shapes for scheduling tests.
class Node : public CloneableModule<Node> {
 public:
  Node(std::string name, std::size_t inputs, std::size_t outputs) : CloneableModule(std::move(name)) {
    Task& t = create_task("run");
    for (std::size_t i = 0; i < inputs; ++i) t.create_input<std::int32_t>("in" + std::to_string(i), 1);
    for (std::size_t o = 0; o < outputs; ++o) t.create_output<std::int32_t>("out" + std::to_string(o), 1);
    t.set_codelet([](Module&, Task&) { return TaskStatus::ok(); });
  }
  Task& run() const { return task(0); }
  Socket& in(std::size_t i) const { return task(0).input(i); }
  Socket& out(std::size_t o) const { return task(0).output(o); }
};

inline std::vector<std::string> names(const std::vector<Task*>& tasks) {
  std::vector<std::string> out;
  for (const Task* t : tasks) out.push_back(t->module().name());
  return out;
}

}  // namespace sigflow::testing
