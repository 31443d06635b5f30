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

#include "sigflow/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "sigflow/affinity.hpp"

namespace sigflow {

namespace {

using clock = std::chrono::steady_clock;

struct Channel {
  Socket* origin = nullptr;
  std::vector<Socket*> consumers;  // original inputs in the stage right after the boundary
};

std::string stage_label(std::size_t s) { return "stage " + std::to_string(s); }

}  // namespace

std::string PipelineStats::csv(double bits_per_frame) const {
  std::ostringstream os;
  os << "stage,workers,frames,push_wait_pct,pull_wait_pct,push_copy_pct,pull_copy_pct,task_pct,other_pct,fps,mbps\n";
  os << std::fixed << std::setprecision(3);
  for (const auto& s : stages) {
    os << s.stage << ',' << s.workers << ',' << s.frames << ',' << s.push_wait_pct << ',' << s.pull_wait_pct << ','
       << s.push_copy_pct << ',' << s.pull_copy_pct << ',' << s.task_pct << ',' << s.other_pct << ','
       << s.throughput_fps << ',' << s.throughput_fps * bits_per_frame / 1e6 << '\n';
  }
  return os.str();
}

Pipeline::Pipeline(PipelinePlan plan) : plan_(std::move(plan)) {
  const std::size_t n_stages = plan_.stages.size();
  if (n_stages == 0) throw Error(Errc::bad_partition, "a pipeline needs at least one stage");
  if (plan_.buffer_capacity == 0) throw Error(Errc::capacity_zero, "buffer capacity must be at least 1");

  // Membership.
  std::unordered_map<const Task*, std::size_t> stage_of;
  {
    std::unordered_map<const Task*, std::size_t> first_of;
    for (std::size_t s = 0; s < n_stages; ++s)
      for (const Task* t : plan_.stages[s].first) {
        if (t == nullptr) throw Error(Errc::bad_partition, stage_label(s) + " lists a null first task");
        auto [it, fresh] = first_of.emplace(t, s);
        if (!fresh && it->second != s)
          throw Error(Errc::bad_partition,
                      t->full_name() + " belongs to " + stage_label(it->second) + " and " + stage_label(s), t->id());
      }
  }
  stages_.resize(n_stages);
  for (std::size_t s = 0; s < n_stages; ++s) {
    const StageSpec& spec = plan_.stages[s];
    if (spec.first.empty()) throw Error(Errc::bad_partition, stage_label(s) + " has no first task");
    if (spec.workers == 0) throw Error(Errc::bad_partition, stage_label(s) + " needs at least one worker");
    validate_pinning(spec.pinning, spec.workers);
    // A stage without last tasks ends where another stage begins.
    std::vector<const Task*> boundary;
    for (std::size_t o = 0; o < plan_.stages.size(); ++o)
      if (o != s)
        for (const Task* t : plan_.stages[o].first)
          if (std::find(spec.last.begin(), spec.last.end(), t) == spec.last.end()) boundary.push_back(t);
    stages_[s].tasks = collect_stage_tasks(spec.first, spec.last, boundary);
    for (Task* t : stages_[s].tasks) {
      auto [it, fresh] = stage_of.emplace(t, s);
      if (!fresh)
        throw Error(Errc::bad_partition,
                    t->full_name() + " belongs to " + stage_label(it->second) + " and " + stage_label(s), t->id());
    }
  }
  if (plan_.entry == nullptr) plan_.entry = plan_.stages[0].first.front();
  if (auto it = stage_of.find(plan_.entry); it == stage_of.end() || it->second != 0)
    throw Error(Errc::bad_partition, "entry " + plan_.entry->full_name() + " is not in the first stage",
                plan_.entry->id());

  // Every task reachable from the stages must be assigned.
  {
    std::set<const Task*> seen;
    std::vector<const Task*> todo;
    for (const auto& spec : plan_.stages)
      for (Task* t : spec.first) todo.push_back(t);
    while (!todo.empty()) {
      const Task* t = todo.back();
      todo.pop_back();
      if (!seen.insert(t).second) continue;
      if (!stage_of.count(t))
        throw Error(Errc::bad_partition, t->full_name() + " is bound into the pipeline but assigned to no stage",
                    t->id());
      for (std::size_t o = 0; o < t->output_count(); ++o)
        for (Socket* sink : t->output(o).sinks()) todo.push_back(&sink->task());
    }
  }

  // Modules must not straddle stages.
  {
    std::map<const Module*, std::size_t> module_stage;
    for (std::size_t s = 0; s < n_stages; ++s)
      for (Task* t : stages_[s].tasks) {
        auto [it, fresh] = module_stage.emplace(&t->module(), s);
        if (!fresh && it->second != s)
          throw Error(Errc::bad_partition,
                      "module '" + t->module().name() + "' has tasks in " + stage_label(it->second) + " and " +
                          stage_label(s),
                      t->module().id());
      }
  }

  // Replication constraints.
  for (std::size_t s = 0; s < n_stages; ++s)
    if (plan_.stages[s].workers > 1) require_cloneable(stages_[s].tasks, "cannot replicate " + stage_label(s));
  for (std::size_t s = 0; s < n_stages; ++s) {
    if (plan_.stages[s].workers <= 1) continue;
    if (s == 0 && n_stages > 1)
      throw Error(Errc::bad_partition, "the first stage feeds later stages and must have a single worker");
    if (s + 1 < n_stages && plan_.stages[s + 1].workers > 1)
      throw Error(Errc::bad_partition, stage_label(s) + " and " + stage_label(s + 1) +
                                           " are both replicated; insert a single-worker stage between them");
  }

  // Channels per boundary.
  std::vector<std::vector<Channel>> boundaries(n_stages > 0 ? n_stages - 1 : 0);
  for (std::size_t s = 0; s < n_stages; ++s) {
    for (Task* t : stages_[s].tasks) {
      for (std::size_t i = 0; i < t->input_count(); ++i) {
        Socket* src = t->input(i).source();
        if (src == nullptr) continue;
        auto it = stage_of.find(&src->task());
        if (it != stage_of.end() && it->second > s)
          throw Error(Errc::bad_partition,
                      t->full_name() + " reads from " + src->task().full_name() + " in a later stage", t->id());
      }
      for (std::size_t o = 0; o < t->output_count(); ++o) {
        Socket& out = t->output(o);
        std::size_t reach = s;
        for (Socket* sink : out.sinks()) reach = std::max(reach, stage_of.at(&sink->task()));
        if (reach == s) continue;
        saved_.push_back({&out, out.sinks()});
        for (std::size_t b = s; b < reach; ++b) {
          Channel ch;
          ch.origin = &out;
          for (Socket* sink : out.sinks())
            if (stage_of.at(&sink->task()) == b + 1) ch.consumers.push_back(sink);
          boundaries[b].push_back(std::move(ch));
        }
      }
    }
  }

  try {
    // Replicas.
    for (std::size_t s = 0; s < n_stages; ++s) {
      const StageSpec& spec = plan_.stages[s];
      stages_[s].replicas.resize(spec.workers);
      for (std::size_t r = 1; r < spec.workers; ++r) {
        std::optional<int> unit;
        if (!spec.pinning.empty()) unit = spec.pinning[r];
        stages_[s].replicas[r].clone = std::make_unique<RegionClone>(RegionClone::make(stages_[s].tasks, unit));
      }
    }

    // Adaptors.
    for (std::size_t b = 0; b < boundaries.size(); ++b) {
      const std::size_t up = plan_.stages[b].workers;
      const std::size_t down = plan_.stages[b + 1].workers;
      AdaptorSide side = AdaptorSide::one_to_one;
      std::size_t fanout = 1;
      if (down > 1) {
        side = AdaptorSide::one_to_n;
        fanout = down;
      } else if (up > 1) {
        side = AdaptorSide::n_to_one;
        fanout = up;
      }
      std::vector<ChannelShape> shapes;
      for (const Channel& ch : boundaries[b])
        shapes.push_back({ch.origin->task().name() + "." + ch.origin->name(), ch.origin->kind(), ch.origin->count()});
      if (shapes.empty())
        throw Error(Errc::bad_partition, "no data flows from " + stage_label(b) + " to " + stage_label(b + 1));
      adaptors_.push_back(std::make_unique<Adaptor>("adaptor" + std::to_string(b) + "_" +
                                                        std::string(to_string(side)),
                                                    side, fanout, std::move(shapes), plan_.buffer_capacity,
                                                    plan_.wait_mode, plan_.copy_mode));
      Adaptor& ad = *adaptors_.back();
      ad.set_timing(plan_.task_timing);

      for (std::size_t p = 0; p < ad.producer_count(); ++p) {
        Task& push = ad.push_task(p);
        for (std::size_t c = 0; c < boundaries[b].size(); ++c) {
          Socket* origin = boundaries[b][c].origin;
          const std::size_t origin_stage = stage_of.at(&origin->task());
          Socket* producer = nullptr;
          if (origin_stage == b) {
            producer = &map(origin->task(), p).output(origin->index());
          } else {
            // Relay: forward what the previous boundary delivered to this replica.
            const auto& prev = boundaries[b - 1];
            std::size_t pc = 0;
            while (prev[pc].origin != origin) ++pc;
            Adaptor& pa = *adaptors_[b - 1];
            const std::size_t consumer = pa.side() == AdaptorSide::one_to_n ? p : 0;
            producer = &pa.pull_task(consumer).output(pc);
          }
          bind(push.input(c), *producer);
        }
      }

      for (std::size_t r = 0; r < down; ++r) {
        Task& pull = ad.pull_task(ad.side() == AdaptorSide::one_to_n ? r : 0);
        for (std::size_t c = 0; c < boundaries[b].size(); ++c) {
          for (Socket* consumer : boundaries[b][c].consumers) {
            Socket& in = map(consumer->task(), r).input(consumer->index());
            unbind(in);
            bind(in, pull.output(c));
          }
        }
      }
    }

    // Stage sequences.
    std::vector<const Task*> excluded;
    for (const auto& ad : adaptors_)
      for (std::size_t i = 0; i < ad->task_count(); ++i) excluded.push_back(&ad->task(i));
    for (std::size_t s = 0; s < n_stages; ++s) {
      for (std::size_t r = 0; r < stages_[s].replicas.size(); ++r) {
        std::vector<Task*> first, last;
        for (Task* t : plan_.stages[s].first) first.push_back(&map(*t, r));
        for (Task* t : plan_.stages[s].last) last.push_back(&map(*t, r));
        auto seq = std::make_unique<Sequence>(std::move(first), std::move(last), excluded);
        seq->set_timing(plan_.task_timing);
        stages_[s].replicas[r].sequence = std::move(seq);
      }
    }
  } catch (...) {
    for (auto& st : stages_) st.replicas.clear();
    restore_bindings();
    adaptors_.clear();
    throw;
  }
}

Pipeline::~Pipeline() {
  for (auto& st : stages_) st.replicas.clear();
  restore_bindings();
  adaptors_.clear();
}

void Pipeline::restore_bindings() noexcept {
  for (const SavedSinks& s : saved_) {
    for (Socket* sink : s.sinks)
      if (sink->source() != nullptr) unbind(*sink);
    for (Socket* sink : s.sinks) bind(*sink, *s.output);
  }
  saved_.clear();
}

Sequence& Pipeline::stage_sequence(std::size_t stage, std::size_t replica) const {
  return *stages_.at(stage).replicas.at(replica).sequence;
}

Task& Pipeline::map(const Task& original, std::size_t replica) const {
  if (replica == 0) return const_cast<Task&>(original);
  for (const Stage& st : stages_) {
    if (replica >= st.replicas.size()) continue;
    const auto& clone = st.replicas[replica].clone;
    if (clone && clone->contains(original)) return clone->map(original);
  }
  throw Error(Errc::invalid_argument, original.full_name() + " has no replica " + std::to_string(replica),
              original.id());
}

std::vector<std::string> Pipeline::inserted_tasks() const {
  std::vector<std::string> names;
  for (const auto& ad : adaptors_)
    for (std::size_t i = 0; i < ad->task_count(); ++i) names.push_back(ad->task(i).full_name());
  return names;
}

std::string Pipeline::dump() const {
  std::ostringstream os;
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    os << "# " << stage_label(s) << " x" << stages_[s].replicas.size() << '\n';
    os << stage_sequence(s, 0).dump();
    if (s < adaptors_.size()) {
      const Adaptor& ad = *adaptors_[s];
      os << "# " << ad.name() << " side=" << to_string(ad.side()) << " fanout=" << ad.fanout()
         << " capacity=" << ad.capacity() << " wait=" << to_string(ad.wait_mode())
         << " copy=" << to_string(ad.copy_mode()) << '\n';
      for (std::size_t c = 0; c < ad.channel_count(); ++c)
        os << "#   channel " << c << ' ' << ad.channel(c).name << ' ' << to_string(ad.channel(c).kind) << 'x'
           << ad.channel(c).count << '\n';
    }
  }
  return os.str();
}

PipelineStats Pipeline::exec(const StopCondition& stop) {
  return run(&stop, std::numeric_limits<std::uint64_t>::max());
}

PipelineStats Pipeline::exec_frames(std::uint64_t frames) { return run(nullptr, frames); }

PipelineStats Pipeline::run(const StopCondition* stop, std::uint64_t frame_limit) {
  for (auto& ad : adaptors_) ad->reset();

  const std::size_t n_stages = stages_.size();
  std::atomic<bool> stop_flag{false};
  std::atomic<std::uint64_t> tickets{0};
  std::mutex stop_mutex;
  std::mutex failure_mutex;
  std::exception_ptr failure;

  struct WorkerResult {
    std::uint64_t frames = 0;
    std::uint64_t aborted = 0;
    std::uint64_t pass_ns = 0;
    std::uint64_t wall_ns = 0;
  };
  std::vector<std::vector<WorkerResult>> results(n_stages);
  for (std::size_t s = 0; s < n_stages; ++s) results[s].resize(stages_[s].replicas.size());

  auto fail = [&](std::exception_ptr e) {
    {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = e;
    }
    stop_flag.store(true);
    for (auto& ad : adaptors_) ad->shutdown();
  };

  auto worker = [&](std::size_t s, std::size_t r) {
    const auto& pin = plan_.stages[s].pinning;
    if (!pin.empty()) pin_current_thread(pin[r]);
    Sequence& seq = *stages_[s].replicas[r].sequence;
    Adaptor* in_ad = s > 0 ? adaptors_[s - 1].get() : nullptr;
    Adaptor* out_ad = s + 1 < n_stages ? adaptors_[s].get() : nullptr;
    Task* pull = in_ad ? &in_ad->pull_task(in_ad->side() == AdaptorSide::one_to_n ? r : 0) : nullptr;
    const std::size_t producer = out_ad && out_ad->side() == AdaptorSide::n_to_one ? r : 0;
    Task* push = out_ad ? &out_ad->push_task(producer) : nullptr;
    const bool final_stage = s + 1 == n_stages;
    const bool replicated_final = final_stage && stages_[s].replicas.size() > 1;
    WorkerResult& res = results[s][r];

    const auto t0 = clock::now();
    try {
      for (;;) {
        if (pull == nullptr) {
          if (stop_flag.load(std::memory_order_acquire)) break;
          if (tickets.fetch_add(1) >= frame_limit) break;
        } else if (pull->execute().aborted()) {
          if (out_ad) out_ad->push_skip(producer);
          continue;
        }

        const auto p0 = clock::now();
        const PassOutcome outcome = seq.run_pass();
        res.pass_ns += static_cast<std::uint64_t>((clock::now() - p0).count());
        if (outcome == PassOutcome::aborted) {
          ++res.aborted;
          if (out_ad && pull) out_ad->push_skip(producer);
          continue;
        }
        if (push) push->execute();
        ++res.frames;

        if (final_stage && stop && !stop_flag.load(std::memory_order_acquire)) {
          std::unique_lock<std::mutex> lock(stop_mutex, std::defer_lock);
          if (replicated_final) lock.lock();
          if (!stop_flag.load() && (*stop)()) stop_flag.store(true, std::memory_order_release);
        }
      }
    } catch (const Error& e) {
      if (e.code() != Errc::shutdown) fail(std::current_exception());
    } catch (...) {
      fail(std::current_exception());
    }
    if (out_ad) out_ad->close(producer);
    res.wall_ns = static_cast<std::uint64_t>((clock::now() - t0).count());
  };

  const auto t0 = clock::now();
  std::vector<std::thread> threads;
  for (std::size_t s = 0; s < n_stages; ++s)
    for (std::size_t r = 0; r < stages_[s].replicas.size(); ++r) threads.emplace_back(worker, s, r);
  for (auto& t : threads) t.join();
  const double wall_s = std::chrono::duration<double>(clock::now() - t0).count();

  if (failure) std::rethrow_exception(failure);

  PipelineStats out;
  out.wall_s = wall_s;
  for (std::size_t s = 0; s < n_stages; ++s) {
    StageStats st;
    st.stage = s;
    st.workers = stages_[s].replicas.size();
    std::uint64_t busy = 0, pass = 0, max_wall = 0;
    double push_wait = 0, push_copy = 0, pull_wait = 0, pull_copy = 0;
    for (std::size_t r = 0; r < st.workers; ++r) {
      const WorkerResult& w = results[s][r];
      st.frames += w.frames;
      st.aborted += w.aborted;
      busy += w.wall_ns;
      pass += w.pass_ns;
      max_wall = std::max(max_wall, w.wall_ns);
    }
    if (s > 0) {
      const Adaptor& ad = *adaptors_[s - 1];
      for (std::size_t c = 0; c < ad.consumer_count(); ++c) {
        pull_wait += double(ad.pull_timing(c).wait_ns);
        pull_copy += double(ad.pull_timing(c).copy_ns);
      }
    }
    if (s + 1 < n_stages) {
      const Adaptor& ad = *adaptors_[s];
      for (std::size_t p = 0; p < ad.producer_count(); ++p) {
        push_wait += double(ad.push_timing(p).wait_ns);
        push_copy += double(ad.push_timing(p).copy_ns);
      }
    }
    st.busy_s = double(busy) / 1e9;
    if (busy > 0) {
      const double total = double(busy);
      st.push_wait_pct = 100.0 * push_wait / total;
      st.pull_wait_pct = 100.0 * pull_wait / total;
      st.push_copy_pct = 100.0 * push_copy / total;
      st.pull_copy_pct = 100.0 * pull_copy / total;
      st.task_pct = 100.0 * double(pass) / total;
      st.other_pct = std::max(
          0.0, 100.0 - st.push_wait_pct - st.pull_wait_pct - st.push_copy_pct - st.pull_copy_pct - st.task_pct);
    }
    if (max_wall > 0) st.throughput_fps = double(st.frames) / (double(max_wall) / 1e9);
    out.stages.push_back(st);
  }
  out.frames_out = out.stages.back().frames;
  out.throughput_fps = wall_s > 0 ? double(out.frames_out) / wall_s : 0.0;
  return out;
}

}  // namespace sigflow
