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

#include "sigflow/plan_config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sigflow {

using nlohmann::json;

Task& resolve_task(const std::string& qualified, std::span<Module* const> modules) {
  const auto dot = qualified.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == qualified.size())
    throw Error(Errc::invalid_argument, "task name '" + qualified + "' is not of the form module.task");
  const std::string mod = qualified.substr(0, dot);
  const std::string task = qualified.substr(dot + 1);
  for (Module* m : modules) {
    if (m->name() != mod) continue;
    for (std::size_t i = 0; i < m->task_count(); ++i)
      if (m->task(i).name() == task) return m->task(i);
    throw Error(Errc::invalid_argument, "module '" + mod + "' has no task '" + task + "'", m->id());
  }
  throw Error(Errc::invalid_argument, "unknown module '" + mod + "'");
}

namespace {

std::vector<Task*> task_list(const json& j, const char* key, std::span<Module* const> modules) {
  std::vector<Task*> out;
  if (!j.contains(key)) return out;
  for (const auto& name : j.at(key)) out.push_back(&resolve_task(name.get<std::string>(), modules));
  return out;
}

}  // namespace

PipelinePlan parse_plan(const std::string& json_text, std::span<Module* const> modules) {
  PipelinePlan plan;
  try {
    const json j = json::parse(json_text);
    for (const auto& js : j.at("stages")) {
      StageSpec st;
      st.first = task_list(js, "first", modules);
      st.last = task_list(js, "last", modules);
      st.workers = js.value("workers", std::size_t{1});
      if (js.contains("pinning")) st.pinning = js.at("pinning").get<std::vector<int>>();
      plan.stages.push_back(std::move(st));
    }
    if (j.contains("entry")) plan.entry = &resolve_task(j.at("entry").get<std::string>(), modules);
    plan.buffer_capacity = j.value("buffer_capacity", std::size_t{1});
    const std::string wait = j.value("wait_mode", std::string("passive"));
    if (wait == "active") {
      plan.wait_mode = WaitMode::active;
    } else if (wait == "passive") {
      plan.wait_mode = WaitMode::passive;
    } else {
      throw Error(Errc::invalid_argument, "wait_mode must be active or passive, not '" + wait + "'");
    }
    const std::string copy = j.value("copy_mode", std::string("deep_copy"));
    if (copy == "deep_copy") {
      plan.copy_mode = CopyMode::deep_copy;
    } else if (copy == "copyless") {
      plan.copy_mode = CopyMode::copyless;
    } else {
      throw Error(Errc::invalid_argument, "copy_mode must be deep_copy or copyless, not '" + copy + "'");
    }
    plan.task_timing = j.value("task_timing", true);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("malformed plan: ") + e.what());
  }
  return plan;
}

PipelinePlan load_plan_file(const std::string& path, std::span<Module* const> modules) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read plan file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_plan(text.str(), modules);
}

std::string plan_to_json(const PipelinePlan& plan) {
  auto names = [](const std::vector<Task*>& tasks) {
    json a = json::array();
    for (Task* t : tasks) a.push_back(t->module().name() + "." + t->name());
    return a;
  };
  json j;
  j["stages"] = json::array();
  for (const auto& st : plan.stages) {
    json js;
    js["first"] = names(st.first);
    js["last"] = names(st.last);
    js["workers"] = st.workers;
    js["pinning"] = st.pinning;
    j["stages"].push_back(js);
  }
  if (plan.entry) j["entry"] = plan.entry->module().name() + "." + plan.entry->name();
  j["buffer_capacity"] = plan.buffer_capacity;
  j["wait_mode"] = std::string(to_string(plan.wait_mode));
  j["copy_mode"] = std::string(to_string(plan.copy_mode));
  j["task_timing"] = plan.task_timing;
  return j.dump(2);
}

}  // namespace sigflow
