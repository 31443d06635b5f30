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

#include "sigflow/graph.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <sstream>

namespace sigflow {

namespace {

std::atomic<std::uint64_t> next_id{1};

std::uint64_t fresh_id() noexcept { return next_id.fetch_add(1, std::memory_order_relaxed); }

std::string shape(const Socket& s) {
  return std::string(to_string(s.kind())) + "x" + std::to_string(s.count());
}

}  // namespace

// Socket ----------------------------------------------------------------------

Socket::Socket(Task& task, SocketDir dir, std::string name, ElemKind kind, std::size_t count, std::size_t index)
    : id_(fresh_id()), task_(&task), dir_(dir), name_(std::move(name)), kind_(kind), count_(count), index_(index) {
  if (count == 0) throw Error(Errc::invalid_argument, "socket '" + name_ + "' needs a positive element count");
  if (dir_ == SocketDir::output) {
    owned_ = std::make_unique<FrameBuffer>(kind, count);
    view_ = owned_.get();
  }
}

Socket::~Socket() {
  if (dir_ == SocketDir::input) {
    unbind(*this);
  } else {
    for (Socket* s : sinks_) s->source_ = nullptr;
  }
}

const FrameBuffer& Socket::frame() const {
  if (dir_ == SocketDir::output) return *view_;
  if (source_ == nullptr)
    throw Error(Errc::unbound_input, task_->full_name() + "::" + name_ + " is not bound", task_->id());
  return *source_->view_;
}

void bind(Socket& in, Socket& out) {
  if (in.dir() != SocketDir::input || out.dir() != SocketDir::output)
    throw Error(Errc::invalid_argument, "bind expects (input, output) sockets");
  if (&in.task() == &out.task())
    throw Error(Errc::self_bind, in.task().full_name() + " cannot be bound to itself", in.task().id());
  if (in.source_ != nullptr)
    throw Error(Errc::already_bound,
                in.task().full_name() + "::" + in.name() + " is already bound to " +
                    in.source_->task().full_name() + "::" + in.source_->name(),
                in.task().id());
  if (in.kind() != out.kind() || in.count() != out.count())
    throw Error(Errc::type_mismatch,
                in.task().full_name() + "::" + in.name() + " (" + shape(in) + ") vs " + out.task().full_name() +
                    "::" + out.name() + " (" + shape(out) + ")",
                in.task().id());
  in.source_ = &out;
  out.sinks_.push_back(&in);
}

void unbind(Socket& in) {
  if (in.dir() != SocketDir::input || in.source_ == nullptr) return;
  auto& sinks = in.source_->sinks_;
  sinks.erase(std::remove(sinks.begin(), sinks.end(), &in), sinks.end());
  in.source_ = nullptr;
}

void SocketAccess::exchange(Socket& out, std::unique_ptr<FrameBuffer>& other) noexcept {
  out.owned_.swap(other);
  out.view_ = out.owned_.get();
}

// Task ------------------------------------------------------------------------

std::string_view to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::standard:
      return "standard";
    case TaskKind::commute:
      return "commute";
    case TaskKind::select:
      return "select";
    case TaskKind::control:
      return "control";
  }
  return "?";
}

Task::Task(Module& module, std::string name, TaskKind kind)
    : id_(fresh_id()), module_(&module), name_(std::move(name)), kind_(kind) {}

Task::Task(Module& module, const Task& proto)
    : id_(fresh_id()),
      module_(&module),
      name_(proto.name_),
      kind_(proto.kind_),
      codelet_(proto.codelet_),
      timing_(proto.timing_),
      auto_generation_(proto.auto_generation_) {
  for (const auto& s : proto.inputs_) create_input(s->name(), s->kind(), s->count());
  for (const auto& s : proto.outputs_) create_output(s->name(), s->kind(), s->count());
}

Task::~Task() {
  // Inputs first so that sinks lists of our own outputs never point at freed
  // sockets during teardown of self-referencing graphs.
  inputs_.clear();
  outputs_.clear();
}

std::string Task::full_name() const { return module_->name() + "." + name_; }

Socket& Task::create_input(std::string name, ElemKind kind, std::size_t count) {
  inputs_.push_back(std::unique_ptr<Socket>(
      new Socket(*this, SocketDir::input, std::move(name), kind, count, inputs_.size())));
  return *inputs_.back();
}

Socket& Task::create_output(std::string name, ElemKind kind, std::size_t count) {
  outputs_.push_back(std::unique_ptr<Socket>(
      new Socket(*this, SocketDir::output, std::move(name), kind, count, outputs_.size())));
  return *outputs_.back();
}

Socket& Task::operator[](std::string_view socket_name) const {
  for (const auto& s : inputs_)
    if (s->name() == socket_name) return *s;
  for (const auto& s : outputs_)
    if (s->name() == socket_name) return *s;
  throw Error(Errc::invalid_argument, full_name() + " has no socket '" + std::string(socket_name) + "'", id_);
}

FrameBuffer& Task::writable(std::size_t output_index) {
  return SocketAccess::owned(*outputs_.at(output_index));
}

bool Task::can_execute() const noexcept {
  return std::all_of(inputs_.begin(), inputs_.end(), [](const auto& s) { return s->source() != nullptr; });
}

TaskStatus Task::execute() {
  // A select only needs the input it forwards; its body checks that one.
  for (const auto& s : inputs_)
    if (s->source() == nullptr && kind_ != TaskKind::select)
      throw Error(Errc::unbound_input, full_name() + "::" + s->name() + " is not bound", id_);
  if (!codelet_) throw Error(Errc::task_failure, full_name() + " has no body", id_);

  using clock = std::chrono::steady_clock;
  clock::time_point t0;
  if (timing_) t0 = clock::now();

  TaskStatus status = TaskStatus::ok();
  try {
    status = codelet_(*module_, *this);
  } catch (const AbortSignal&) {
    status = TaskStatus::abort();
  } catch (const Error& e) {
    if (e.subject()) throw;
    throw Error(e.code(), full_name() + ": " + e.what(), id_);
  } catch (const std::exception& e) {
    throw Error(Errc::task_failure, full_name() + ": " + e.what(), id_);
  }

  if (timing_) stats_.total_ns += static_cast<std::uint64_t>((clock::now() - t0).count());
  ++stats_.exec_count;
  if (auto_generation_ && !status.aborted()) stamp_generation();
  return status;
}

void Task::stamp_generation() {
  if (outputs_.empty()) return;
  std::uint64_t g = 0;
  if (inputs_.empty()) {
    g = generation_counter_++;
  } else {
    for (const auto& s : inputs_) g = std::max(g, s->frame().generation());
  }
  for (const auto& s : outputs_)
    if (SocketAccess::exposes_owned(*s)) SocketAccess::owned(*s).set_generation(g);
}

// Module ----------------------------------------------------------------------

std::string_view to_string(Cloneability c) noexcept {
  switch (c) {
    case Cloneability::cloneable:
      return "cloneable";
    case Cloneability::cloneable_with_deep_copy:
      return "cloneable_with_deep_copy";
    case Cloneability::sequential_only:
      return "sequential_only";
  }
  return "?";
}

Module::Module(std::string name, Cloneability cloneability)
    : id_(fresh_id()), name_(std::move(name)), cloneability_(cloneability) {}

Module::Module(const Module& other) : id_(fresh_id()), name_(other.name_), cloneability_(other.cloneability_) {
  tasks_.reserve(other.tasks_.size());
  for (const auto& t : other.tasks_) tasks_.push_back(std::unique_ptr<Task>(new Task(*this, *t)));
}

Module::~Module() = default;

Task& Module::create_task(std::string name, TaskKind kind) {
  tasks_.push_back(std::unique_ptr<Task>(new Task(*this, std::move(name), kind)));
  return *tasks_.back();
}

Task& Module::operator[](std::string_view task_name) const {
  for (const auto& t : tasks_)
    if (t->name() == task_name) return *t;
  throw Error(Errc::invalid_argument, name_ + " has no task '" + std::string(task_name) + "'", id_);
}

std::unique_ptr<Module> Module::clone() const {
  if (cloneability_ == Cloneability::sequential_only)
    throw Error(Errc::not_cloneable, "module '" + name_ + "' is sequential_only", id_);
  std::unique_ptr<Module> copy(clone_raw());
  copy->deep_copy(*this);
  return copy;
}

Module* Module::clone_raw() const {
  throw Error(Errc::not_cloneable, "module '" + name_ + "' does not implement cloning", id_);
}

void Module::deep_copy(const Module&) {}

// Introspection ---------------------------------------------------------------

std::string dump_graph(std::span<const Module* const> modules) {
  std::ostringstream os;
  os << "digraph tasks {\n  rankdir=LR;\n";
  for (const Module* m : modules) {
    for (std::size_t ti = 0; ti < m->task_count(); ++ti) {
      const Task& t = m->task(ti);
      os << "  \"" << t.full_name() << "\" [shape=record,label=\"{";
      for (std::size_t i = 0; i < t.input_count(); ++i)
        os << (i ? "|" : "{") << "<i" << i << "> " << t.input(i).name() << " " << shape(t.input(i));
      if (t.input_count()) os << "}|";
      os << t.full_name() << " (" << to_string(t.kind()) << ")";
      for (std::size_t i = 0; i < t.output_count(); ++i)
        os << (i ? "|" : "|{") << "<o" << i << "> " << t.output(i).name() << " " << shape(t.output(i));
      if (t.output_count()) os << "}";
      os << "}\"];\n";
    }
  }
  for (const Module* m : modules) {
    for (std::size_t ti = 0; ti < m->task_count(); ++ti) {
      const Task& t = m->task(ti);
      for (std::size_t i = 0; i < t.output_count(); ++i) {
        for (const Socket* sink : t.output(i).sinks()) {
          os << "  \"" << t.full_name() << "\":o" << i << " -> \"" << sink->task().full_name() << "\":i"
             << sink->index() << ";\n";
        }
      }
    }
  }
  os << "}\n";
  return os.str();
}

std::vector<std::string> audit_bindings(std::span<const Module* const> modules) {
  std::vector<std::string> problems;
  for (const Module* m : modules) {
    for (std::size_t ti = 0; ti < m->task_count(); ++ti) {
      const Task& t = m->task(ti);
      for (std::size_t i = 0; i < t.input_count(); ++i) {
        const Socket& in = t.input(i);
        const Socket* src = in.source();
        if (!src) continue;
        if (src->kind() != in.kind() || src->count() != in.count())
          problems.push_back(t.full_name() + "::" + in.name() + " shape disagrees with its source");
        if (std::count(src->sinks().begin(), src->sinks().end(), &in) != 1)
          problems.push_back(t.full_name() + "::" + in.name() + " missing from its source's sinks");
      }
      for (std::size_t i = 0; i < t.output_count(); ++i) {
        const auto& sinks = t.output(i).sinks();
        for (std::size_t a = 0; a < sinks.size(); ++a) {
          if (sinks[a]->source() != &t.output(i))
            problems.push_back(t.full_name() + "::" + t.output(i).name() + " lists a sink bound elsewhere");
          for (std::size_t b = a + 1; b < sinks.size(); ++b)
            if (sinks[a] == sinks[b]) problems.push_back(t.full_name() + "::" + t.output(i).name() + " duplicate sink");
        }
      }
    }
  }
  return problems;
}

}  // namespace sigflow
