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

// Modules, tasks and sockets. A module groups tasks that share private state;
// a task is a single-threaded function reading input sockets and writing
// output sockets; binding an input socket to an output socket builds the
// task graph that sequences and pipelines are derived from.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigflow/error.hpp"
#include "sigflow/frame.hpp"

namespace sigflow {

using SocketId = std::uint64_t;
using TaskId = std::uint64_t;
using ModuleId = std::uint64_t;

class Module;
class Task;

enum class SocketDir : std::uint8_t { input, output };

class Socket {
 public:
  ~Socket();
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  SocketId id() const noexcept { return id_; }
  Task& task() const noexcept { return *task_; }
  SocketDir dir() const noexcept { return dir_; }
  ElemKind kind() const noexcept { return kind_; }
  std::size_t count() const noexcept { return count_; }
  const std::string& name() const noexcept { return name_; }
  /// Position among the owning task's inputs (or outputs).
  std::size_t index() const noexcept { return index_; }

  /// Input sockets: the unique bound output, or nullptr.
  Socket* source() const noexcept { return source_; }
  /// Output sockets: bound inputs, in binding order.
  const std::vector<Socket*>& sinks() const noexcept { return sinks_; }
  bool is_bound() const noexcept { return dir_ == SocketDir::input ? source_ != nullptr : !sinks_.empty(); }

  /// Frame visible through this socket: for an output, the frame it currently
  /// exposes (its own buffer or a forwarded one); for an input, its source's.
  const FrameBuffer& frame() const;

 private:
  friend class Task;
  friend struct SocketAccess;
  friend void bind(Socket& in, Socket& out);
  friend void unbind(Socket& in);

  Socket(Task& task, SocketDir dir, std::string name, ElemKind kind, std::size_t count, std::size_t index);

  SocketId id_;
  Task* task_;
  SocketDir dir_;
  std::string name_;
  ElemKind kind_;
  std::size_t count_;
  std::size_t index_;
  Socket* source_ = nullptr;
  std::vector<Socket*> sinks_;
  std::unique_ptr<FrameBuffer> owned_;
  const FrameBuffer* view_ = nullptr;
};

/// Binds `in` (an input socket) to `out` (an output socket).
/// Errors: already_bound, type_mismatch, self_bind, invalid_argument (wrong directions).
void bind(Socket& in, Socket& out);
/// Detaches an input socket from its source; no-op when unbound.
void unbind(Socket& in);

enum class TaskKind : std::uint8_t { standard, commute, select, control };
std::string_view to_string(TaskKind kind) noexcept;

/// Outcome of one task execution. Abort is control flow, not an error; the
/// path index is set by commute/select tasks.
class TaskStatus {
 public:
  enum class Code : std::uint8_t { ok, abort };

  static constexpr TaskStatus ok() noexcept { return TaskStatus(Code::ok, -1); }
  static constexpr TaskStatus abort() noexcept { return TaskStatus(Code::abort, -1); }
  static constexpr TaskStatus path(std::size_t p) noexcept { return TaskStatus(Code::ok, static_cast<std::int64_t>(p)); }

  constexpr Code code() const noexcept { return code_; }
  constexpr bool aborted() const noexcept { return code_ == Code::abort; }
  constexpr std::optional<std::size_t> selected_path() const noexcept {
    if (path_ < 0) return std::nullopt;
    return static_cast<std::size_t>(path_);
  }

  friend constexpr bool operator==(TaskStatus, TaskStatus) = default;

 private:
  constexpr TaskStatus(Code c, std::int64_t p) noexcept : code_(c), path_(p) {}
  Code code_;
  std::int64_t path_;
};

struct TaskStats {
  std::uint64_t exec_count = 0;
  std::uint64_t total_ns = 0;
  double mean_ns() const noexcept { return exec_count ? double(total_ns) / double(exec_count) : 0.0; }
};

using Codelet = std::function<TaskStatus(Module&, Task&)>;

class Task {
 public:
  Task(const Task&) = delete;
  Task& operator=(const Task&) = delete;
  ~Task();

  TaskId id() const noexcept { return id_; }
  const std::string& name() const noexcept { return name_; }
  /// "module.task"
  std::string full_name() const;
  Module& module() const noexcept { return *module_; }
  TaskKind kind() const noexcept { return kind_; }

  Socket& create_input(std::string name, ElemKind kind, std::size_t count);
  Socket& create_output(std::string name, ElemKind kind, std::size_t count);
  template <class T>
  Socket& create_input(std::string name, std::size_t count) {
    return create_input(std::move(name), elem_kind_of<T>::value, count);
  }
  template <class T>
  Socket& create_output(std::string name, std::size_t count) {
    return create_output(std::move(name), elem_kind_of<T>::value, count);
  }

  void set_codelet(Codelet codelet) { codelet_ = std::move(codelet); }

  std::size_t input_count() const noexcept { return inputs_.size(); }
  std::size_t output_count() const noexcept { return outputs_.size(); }
  Socket& input(std::size_t i) const { return *inputs_.at(i); }
  Socket& output(std::size_t i) const { return *outputs_.at(i); }
  /// Socket lookup by name; inputs are searched first.
  Socket& operator[](std::string_view socket_name) const;

  template <class T>
  std::span<const T> in(std::size_t i) const {
    return input(i).frame().template as<T>();
  }
  template <class T>
  std::span<T> out(std::size_t i) {
    return writable(i).template as<T>();
  }
  const FrameBuffer& in_frame(std::size_t i) const { return input(i).frame(); }
  FrameBuffer& writable(std::size_t output_index);

  bool can_execute() const noexcept;

  /// Runs the body once. Throws unbound_input when an input is unbound and
  /// task_failure (with this task's id) when the body throws.
  TaskStatus execute();

  const TaskStats& stats() const noexcept { return stats_; }
  void reset_stats() noexcept { stats_ = {}; }
  void set_timing(bool enabled) noexcept { timing_ = enabled; }
  bool timing() const noexcept { return timing_; }

  /// When enabled (default), owned outputs of a successful execution are
  /// stamped with the newest input generation, or with a per-task counter for
  /// tasks without inputs. Forwarding tasks turn this off.
  void set_auto_generation(bool enabled) noexcept { auto_generation_ = enabled; }

 private:
  friend class Module;
  Task(Module& module, std::string name, TaskKind kind);
  Task(Module& module, const Task& proto);
  void stamp_generation();

  TaskId id_;
  Module* module_;
  std::string name_;
  TaskKind kind_;
  Codelet codelet_;
  std::vector<std::unique_ptr<Socket>> inputs_;
  std::vector<std::unique_ptr<Socket>> outputs_;
  TaskStats stats_;
  bool timing_ = true;
  bool auto_generation_ = true;
  std::uint64_t generation_counter_ = 0;
};

enum class Cloneability : std::uint8_t { cloneable, cloneable_with_deep_copy, sequential_only };
std::string_view to_string(Cloneability c) noexcept;

/// Base class of every module. Copying is reserved to `clone()`: the copy
/// constructor duplicates task structure (unbound sockets, fresh buffers),
/// then `deep_copy` lets the module re-allocate writable resources.
class Module {
 public:
  explicit Module(std::string name, Cloneability cloneability = Cloneability::cloneable);
  virtual ~Module();
  Module& operator=(const Module&) = delete;

  ModuleId id() const noexcept { return id_; }
  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  Cloneability cloneability() const noexcept { return cloneability_; }

  Task& create_task(std::string name, TaskKind kind = TaskKind::standard);
  std::size_t task_count() const noexcept { return tasks_.size(); }
  Task& task(std::size_t i) const { return *tasks_.at(i); }
  Task& operator[](std::string_view task_name) const;

  /// Throws not_cloneable for sequential_only modules or modules without a
  /// copy implementation.
  std::unique_ptr<Module> clone() const;

  /// Addresses of writable storage owned by the module, for isolation audits.
  virtual std::vector<const void*> writable_resources() const { return {}; }

  /// Called when a sequence pass containing this module's control-flow tasks
  /// aborts.
  virtual void on_abort_restart() {}

 protected:
  Module(const Module& other);
  virtual Module* clone_raw() const;
  virtual void deep_copy(const Module& source);
  void set_cloneability(Cloneability c) noexcept { cloneability_ = c; }

 private:
  ModuleId id_;
  std::string name_;
  Cloneability cloneability_;
  std::vector<std::unique_ptr<Task>> tasks_;
};

/// Supplies clone_raw() through Derived's copy constructor.
template <class Derived, class Base = Module>
class CloneableModule : public Base {
 public:
  using Base::Base;

 protected:
  CloneableModule(const CloneableModule&) = default;
  Module* clone_raw() const override { return new Derived(static_cast<const Derived&>(*this)); }
};

/// Adapts a typed body `TaskStatus(M&, Task&)` to a Codelet.
template <class M, class F>
Codelet make_codelet(F body) {
  return [body = std::move(body)](Module& m, Task& t) -> TaskStatus { return body(static_cast<M&>(m), t); };
}

/// Low-level buffer plumbing used by forwarding tasks and adaptors.
struct SocketAccess {
  /// Makes `out` expose `frame` without copying.
  static void forward(Socket& out, const FrameBuffer& frame) noexcept { out.view_ = &frame; }
  /// Restores `out` to exposing its own buffer.
  static void reset_view(Socket& out) noexcept { out.view_ = out.owned_.get(); }
  static bool exposes_owned(const Socket& out) noexcept { return out.view_ == out.owned_.get(); }
  static FrameBuffer& owned(Socket& out) noexcept { return *out.owned_; }
  /// Swaps the output's own buffer with `other`; the socket then exposes the
  /// buffer it received.
  static void exchange(Socket& out, std::unique_ptr<FrameBuffer>& other) noexcept;
};

/// Deterministic DOT dump of tasks, sockets and bindings. Names, not ids, are
/// printed so identical graphs produce identical text.
std::string dump_graph(std::span<const Module* const> modules);

/// Checks every recorded binding for shape agreement and source/sink symmetry.
/// Returns a list of violations (empty when the graph is consistent).
std::vector<std::string> audit_bindings(std::span<const Module* const> modules);

}  // namespace sigflow
