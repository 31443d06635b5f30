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

#include "sigflow/replication.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "sigflow/affinity.hpp"

namespace sigflow {

std::unique_ptr<Module> clone_module(const Module& m) { return m.clone(); }

namespace {

std::vector<Module*> owning_modules(std::span<Task* const> tasks) {
  std::vector<Module*> mods;
  for (Task* t : tasks)
    if (std::find(mods.begin(), mods.end(), &t->module()) == mods.end()) mods.push_back(&t->module());
  return mods;
}

}  // namespace

void require_cloneable(std::span<Task* const> tasks, const std::string& context) {
  for (Task* t : tasks) {
    if (t->module().cloneability() == Cloneability::sequential_only)
      throw Error(Errc::not_cloneable,
                  context + ": module '" + t->module().name() + "' (task " + t->full_name() + ") is sequential_only",
                  t->module().id());
  }
}

RegionClone RegionClone::copy_modules(std::span<Task* const> tasks) {
  require_cloneable(tasks, "cannot duplicate");
  RegionClone rc;
  for (Module* m : owning_modules(tasks)) {
    rc.modules_.push_back(m->clone());
    Module& copy = *rc.modules_.back();
    for (std::size_t i = 0; i < m->task_count(); ++i) {
      rc.forward_.emplace(&m->task(i), &copy.task(i));
      rc.backward_.emplace(&copy.task(i), &m->task(i));
    }
  }
  return rc;
}

void RegionClone::bind_like(std::span<Task* const> tasks) {
  // Internal bindings follow each output's sink order so that the copy's
  // depth-first schedule matches the original's.
  for (Task* t : tasks) {
    Task& ct = map(*t);
    for (std::size_t o = 0; o < t->output_count(); ++o) {
      for (Socket* sink : t->output(o).sinks()) {
        if (!contains(sink->task())) continue;
        bind(map(sink->task()).input(sink->index()), ct.output(o));
      }
    }
  }
  for (Task* t : tasks) {
    Task& ct = map(*t);
    for (std::size_t i = 0; i < t->input_count(); ++i) {
      Socket* src = t->input(i).source();
      if (src == nullptr || contains(src->task())) continue;
      bind(ct.input(i), *src);
    }
  }
}

RegionClone RegionClone::make(std::span<Task* const> tasks, std::optional<int> unit) {
  RegionClone rc;
  if (unit) {
    std::exception_ptr failure;
    std::thread worker([&] {
      pin_current_thread(*unit);
      try {
        rc = copy_modules(tasks);
      } catch (...) {
        failure = std::current_exception();
      }
    });
    worker.join();
    if (failure) std::rethrow_exception(failure);
  } else {
    rc = copy_modules(tasks);
  }
  rc.bind_like(tasks);
  return rc;
}

Task& RegionClone::map(const Task& original) const {
  auto it = forward_.find(&original);
  if (it == forward_.end())
    throw Error(Errc::invalid_argument, original.full_name() + " is not part of the cloned region", original.id());
  return *it->second;
}

const Task* RegionClone::original_of(const Task& clone) const noexcept {
  auto it = backward_.find(&clone);
  return it == backward_.end() ? nullptr : it->second;
}

ReplicaSet duplicate_sequence(const Sequence& seq, const CloneSpec& spec) {
  if (spec.replica_count == 0) throw Error(Errc::invalid_argument, "replica count must be at least 1");
  validate_pinning(spec.pinning, spec.replica_count);
  const std::vector<Task*> tasks = seq.tasks();
  require_cloneable(tasks, "cannot duplicate sequence");

  std::vector<std::unique_ptr<Replica>> replicas;
  for (std::size_t r = 0; r < spec.replica_count; ++r) {
    std::optional<int> unit;
    if (!spec.pinning.empty()) unit = spec.pinning[r];
    RegionClone rc = RegionClone::make(tasks, unit);
    std::vector<Task*> first, last;
    for (Task* t : seq.first_tasks()) first.push_back(&rc.map(*t));
    for (Task* t : seq.last_tasks()) last.push_back(&rc.map(*t));
    Sequence copy(std::move(first), std::move(last));
    replicas.push_back(std::make_unique<Replica>(std::move(rc), std::move(copy)));
  }
  return ReplicaSet(std::move(replicas), spec.pinning);
}

std::vector<ExecStats> ReplicaSet::exec(const std::function<bool(std::size_t)>& stop) {
  std::vector<ExecStats> results(replicas_.size());
  std::atomic<bool> failed{false};
  std::exception_ptr first_failure;
  std::mutex failure_mutex;

  std::vector<std::thread> workers;
  workers.reserve(replicas_.size());
  for (std::size_t r = 0; r < replicas_.size(); ++r) {
    workers.emplace_back([&, r] {
      if (!pinning_.empty()) pin_current_thread(pinning_[r]);
      try {
        results[r] = replicas_[r]->sequence().exec([&] { return failed.load(std::memory_order_relaxed) || stop(r); });
      } catch (...) {
        failed.store(true);
        std::lock_guard lock(failure_mutex);
        if (!first_failure) first_failure = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_failure) std::rethrow_exception(first_failure);
  return results;
}

std::vector<std::string> ReplicaSet::isolation_audit() const {
  std::map<const void*, std::size_t> owner;
  std::vector<std::string> problems;
  auto claim = [&](const void* p, std::size_t r, const std::string& what) {
    if (p == nullptr) return;
    auto [it, fresh] = owner.emplace(p, r);
    if (!fresh && it->second != r)
      problems.push_back(what + " shared by replicas " + std::to_string(it->second) + " and " + std::to_string(r));
  };
  for (std::size_t r = 0; r < replicas_.size(); ++r) {
    for (const auto& m : replicas_[r]->region().modules()) {
      claim(m.get(), r, "module " + m->name());
      for (const void* res : m->writable_resources()) claim(res, r, "resource of " + m->name());
      for (std::size_t ti = 0; ti < m->task_count(); ++ti) {
        Task& t = m->task(ti);
        for (std::size_t o = 0; o < t.output_count(); ++o)
          claim(SocketAccess::owned(t.output(o)).bytes().data(), r, "buffer of " + t.full_name() + "::" + t.output(o).name());
      }
    }
  }
  return problems;
}

}  // namespace sigflow
