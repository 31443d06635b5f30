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

#include "sigflow/sequence.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace sigflow {

std::string_view to_string(SubSequenceKind kind) noexcept {
  switch (kind) {
    case SubSequenceKind::plain:
      return "plain";
    case SubSequenceKind::loop:
      return "loop";
    case SubSequenceKind::switch_:
      return "switch";
  }
  return "?";
}

namespace {

// Depth-first analysis. A task is appended to the current sub-sequence once
// all of its input sockets have been visited; a select task is appended when
// its highest-index input is visited and always opens a new sub-sequence; a
// commute task closes its sub-sequence and opens one per output path.
class Builder {
 public:
  Builder(const std::vector<Task*>& first, const std::vector<Task*>& last, const std::vector<const Task*>& excluded)
      : first_(first), last_(last.begin(), last.end()), excluded_(excluded.begin(), excluded.end()) {
    compute_closure();
  }

  void run() {
    const std::size_t root = new_node();
    for (Task* f : first_) {
      if (scheduled_.count(f)) continue;
      reached_.insert(f);
      if (f->kind() == TaskKind::select && !nodes_[root].tasks.empty()) {
        const std::size_t s = select_node(f);
        link(root, s);
        schedule(f, s);
      } else {
        schedule(f, root);
      }
    }
  }

  void check_strict() const {
    for (const Task* t : reached_) {
      const bool select = t->kind() == TaskKind::select;
      for (std::size_t i = 0; i < t->input_count(); ++i) {
        if (t->input(i).source() != nullptr) continue;
        if (select && i + 1 != t->input_count()) continue;
        throw Error(Errc::dangling_input, t->full_name() + "::" + t->input(i).name() + " is unbound", t->id());
      }
    }
    for (const Task* t : reached_) {
      if (!scheduled_.count(t))
        throw Error(Errc::cycle,
                    t->full_name() + " never became ready (cyclic dependency outside a switcher, or an input "
                                     "produced past a last task)",
                    t->id());
    }
    for (const Task* t : last_) {
      if (!scheduled_.count(t))
        throw Error(Errc::unreachable, "last task " + t->full_name() + " is not reachable from the first tasks",
                    t->id());
    }
  }

  std::vector<SubSequence> take_nodes() {
    for (auto& n : nodes_) {
      if (n.branch == nullptr) continue;
      const bool loop = !n.tasks.empty() && n.tasks.front()->kind() == TaskKind::select &&
                        &n.tasks.front()->module() == &n.branch->module();
      n.kind = loop ? SubSequenceKind::loop : SubSequenceKind::switch_;
    }
    return std::move(nodes_);
  }

  std::vector<Task*> scheduled_in_order() const {
    std::vector<Task*> out;
    for (const auto& n : nodes_) out.insert(out.end(), n.tasks.begin(), n.tasks.end());
    return out;
  }

 private:
  void compute_closure() {
    std::vector<const Task*> stack(first_.begin(), first_.end());
    while (!stack.empty()) {
      const Task* t = stack.back();
      stack.pop_back();
      if (!closure_.insert(t).second) continue;
      for (std::size_t o = 0; o < t->output_count(); ++o)
        for (const Socket* sink : t->output(o).sinks())
          if (!excluded_.count(&sink->task())) stack.push_back(&sink->task());
    }
  }

  // An input whose producer can never be visited from the first tasks counts
  // as already visited (data coming from outside the sequence).
  bool ready(const Task& t, std::size_t input) const {
    const Socket* src = t.input(input).source();
    if (src == nullptr || !closure_.count(&src->task())) return true;
    auto it = visited_.find(&t);
    return it != visited_.end() && it->second[input];
  }

  std::size_t new_node() {
    SubSequence n;
    n.id = nodes_.size();
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  std::size_t select_node(const Task* sel) {
    auto it = select_nodes_.find(sel);
    if (it != select_nodes_.end()) return it->second;
    const std::size_t s = new_node();
    select_nodes_.emplace(sel, s);
    return s;
  }

  void link(std::size_t from, std::size_t to) {
    auto& n = nodes_[from];
    if (n.branch == nullptr && n.successors.empty()) n.successors.push_back(to);
  }

  void schedule(Task* t, std::size_t node) {
    scheduled_.insert(t);
    node_of_[t] = node;
    nodes_[node].tasks.push_back(t);
    if (t->kind() == TaskKind::select) select_nodes_.emplace(t, node);
    if (last_.count(t)) return;
    if (t->kind() == TaskKind::commute) {
      nodes_[node].branch = t;
      for (std::size_t o = 0; o < t->output_count(); ++o) {
        const std::size_t path = new_node();
        nodes_[node].successors.push_back(path);
        follow(t->output(o), path);
      }
      return;
    }
    for (std::size_t o = 0; o < t->output_count(); ++o) follow(t->output(o), node);
  }

  void follow(const Socket& out, std::size_t node) {
    const std::vector<Socket*> sinks = out.sinks();
    for (Socket* s : sinks) visit(*s, node);
  }

  void visit(Socket& in, std::size_t node) {
    Task& t = in.task();
    if (excluded_.count(&t)) return;
    reached_.insert(&t);
    auto& marks = visited_[&t];
    if (marks.size() != t.input_count()) marks.assign(t.input_count(), false);
    marks[in.index()] = true;

    if (t.kind() == TaskKind::select) {
      const std::size_t s = select_node(&t);
      link(node, s);
      if (!scheduled_.count(&t) && ready(t, t.input_count() - 1)) schedule(&t, s);
      return;
    }
    if (scheduled_.count(&t)) return;
    for (std::size_t i = 0; i < t.input_count(); ++i)
      if (!ready(t, i)) return;
    // Inputs may come from different sub-sequences (e.g. one from before a
    // loop, one from its exit path); run after the latest producer.
    std::size_t target = node;
    for (std::size_t i = 0; i < t.input_count(); ++i) {
      const Socket* src = t.input(i).source();
      if (src == nullptr) continue;
      auto it = node_of_.find(&src->task());
      if (it != node_of_.end()) target = std::max(target, it->second);
    }
    schedule(&t, target);
  }

  std::vector<Task*> first_;
  std::unordered_set<const Task*> last_;
  std::unordered_set<const Task*> excluded_;
  std::unordered_set<const Task*> closure_;
  std::unordered_set<const Task*> reached_;
  std::unordered_set<const Task*> scheduled_;
  std::unordered_map<const Task*, std::vector<bool>> visited_;
  std::unordered_map<const Task*, std::size_t> select_nodes_;
  std::unordered_map<const Task*, std::size_t> node_of_;
  std::vector<SubSequence> nodes_;
};

}  // namespace

Sequence::Sequence(std::vector<Task*> first, std::vector<Task*> last, std::vector<const Task*> excluded)
    : first_(std::move(first)), last_(std::move(last)) {
  if (first_.empty()) throw Error(Errc::invalid_argument, "a sequence needs at least one first task");
  for (const Task* t : first_)
    if (t == nullptr) throw Error(Errc::invalid_argument, "null first task");
  Builder b(first_, last_, excluded);
  b.run();
  b.check_strict();
  nodes_ = b.take_nodes();
}

std::vector<Task*> collect_stage_tasks(const std::vector<Task*>& first, const std::vector<Task*>& last,
                                      const std::vector<const Task*>& boundary) {
  Builder b(first, last, boundary);
  b.run();
  return b.scheduled_in_order();
}

std::vector<Task*> Sequence::tasks() const {
  std::vector<Task*> out;
  for (const auto& n : nodes_) out.insert(out.end(), n.tasks.begin(), n.tasks.end());
  return out;
}

std::vector<Module*> Sequence::modules() const {
  std::vector<Module*> out;
  for (Task* t : tasks())
    if (std::find(out.begin(), out.end(), &t->module()) == out.end()) out.push_back(&t->module());
  return out;
}

void Sequence::record(TaskId task, bool aborted) {
  if (log_capacity_ == 0) return;
  LogEntry e{pass_index_, task, aborted};
  if (log_.size() < log_capacity_) {
    log_.push_back(e);
  } else {
    log_[log_head_] = e;
    log_head_ = (log_head_ + 1) % log_capacity_;
  }
}

void Sequence::reset_control_state() {
  std::vector<Module*> done;
  for (const auto& n : nodes_) {
    for (Task* t : n.tasks) {
      if (t->kind() == TaskKind::standard) continue;
      Module* m = &t->module();
      if (std::find(done.begin(), done.end(), m) != done.end()) continue;
      done.push_back(m);
      m->on_abort_restart();
    }
  }
}

PassOutcome Sequence::run_pass() {
  std::size_t node = 0;
  for (;;) {
    const SubSequence& n = nodes_[node];
    std::optional<std::size_t> path;
    for (Task* t : n.tasks) {
      const TaskStatus st = t->execute();
      record(t->id(), st.aborted());
      if (st.aborted()) {
        reset_control_state();
        ++pass_index_;
        return PassOutcome::aborted;
      }
      if (t == n.branch) path = st.selected_path();
    }
    if (n.branch != nullptr) {
      if (!path || *path >= n.successors.size())
        throw Error(Errc::path_out_of_range, n.branch->full_name() + " returned no valid path", n.branch->id());
      node = n.successors[*path];
    } else if (n.successors.empty()) {
      break;
    } else {
      node = n.successors.front();
    }
  }
  ++pass_index_;
  return PassOutcome::completed;
}

ExecStats Sequence::exec(const StopCondition& stop) {
  using clock = std::chrono::steady_clock;
  ExecStats s;
  const auto t0 = clock::now();
  for (;;) {
    if (run_pass() == PassOutcome::aborted) {
      ++s.passes_aborted;
      continue;
    }
    ++s.passes_completed;
    ++s.stop_evaluations;
    if (stop()) break;
  }
  s.wall_ns = static_cast<std::uint64_t>((clock::now() - t0).count());
  return s;
}

ExecStats Sequence::exec_passes(std::uint64_t passes) {
  if (passes == 0) return {};
  std::uint64_t done = 0;
  return exec([&] { return ++done >= passes; });
}

std::vector<TaskStatRow> Sequence::stats() const {
  std::vector<TaskStatRow> rows;
  std::uint64_t total = 0;
  for (Task* t : tasks()) {
    const auto& st = t->stats();
    rows.push_back({t->full_name(), t->kind(), st.exec_count, st.total_ns, st.mean_ns(), 0.0});
    total += st.total_ns;
  }
  if (total)
    for (auto& r : rows) r.share_pct = 100.0 * double(r.total_ns) / double(total);
  return rows;
}

void Sequence::reset_stats() {
  for (Task* t : tasks()) t->reset_stats();
}

void Sequence::set_timing(bool enabled) {
  for (Task* t : tasks()) t->set_timing(enabled);
}

void Sequence::enable_log(std::size_t capacity) {
  log_capacity_ = capacity;
  log_head_ = 0;
  log_.clear();
  log_.reserve(capacity);
}

std::vector<LogEntry> Sequence::log() const {
  std::vector<LogEntry> out;
  out.reserve(log_.size());
  for (std::size_t i = 0; i < log_.size(); ++i) out.push_back(log_[(log_head_ + i) % log_.size()]);
  return out;
}

std::string Sequence::dump() const {
  std::ostringstream os;
  os << "digraph sequence {\n  node [shape=box];\n";
  for (const auto& n : nodes_) {
    os << "  ss" << n.id << " [label=\"SS" << n.id << " (" << to_string(n.kind) << ")";
    for (const Task* t : n.tasks) os << "\\n" << t->full_name();
    os << "\"];\n";
  }
  for (const auto& n : nodes_) {
    for (std::size_t i = 0; i < n.successors.size(); ++i) {
      os << "  ss" << n.id << " -> ss" << n.successors[i];
      if (n.branch != nullptr) os << " [label=\"path " << i << "\"]";
      os << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string stats_csv(const std::vector<TaskStatRow>& rows) {
  std::ostringstream os;
  os << "task,exec_count,total_ms,mean_us,share_pct\n";
  os << std::fixed;
  for (const auto& r : rows) {
    os << r.task << ',' << r.exec_count << ',' << std::setprecision(3) << double(r.total_ns) / 1e6 << ','
       << std::setprecision(4) << r.mean_ns / 1e3 << ',' << std::setprecision(2) << r.share_pct << '\n';
  }
  return os.str();
}

}  // namespace sigflow
