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


#include <gtest/gtest.h>

#include <map>
#include <random>

#include "helpers.hpp"
#include "sigflow/sequence.hpp"
#include "sigflow/switcher.hpp"

namespace sigflow {
namespace {

using testing::Adder;
using testing::Collector;
using testing::Counter;
using testing::Gate;

/// Emits a fixed integer (or a programmable one).
class Constant : public CloneableModule<Constant> {
 public:
  Constant(std::string name, std::int32_t v, std::size_t count = 1) : CloneableModule(std::move(name)), value(v) {
    Task& t = create_task("emit");
    t.create_output<std::int32_t>("out", count);
    t.set_codelet(make_codelet<Constant>([](Constant& m, Task& t) {
      for (auto& x : t.out<std::int32_t>(0)) x = m.value;
      return TaskStatus::ok();
    }));
  }
  Task& emit() const { return task(0); }
  std::int32_t value;
};

TEST(Commute, RoutesToControlPathWithoutCopy) {
  Switcher sw("sw", 2, ElemKind::i32, 16);
  Constant data("data", 42, 16), ctrl("ctrl", 0);
  bind(sw.commute_data(), data.emit().output(0));
  bind(sw.commute_ctrl(), ctrl.emit().output(0));
  EXPECT_EQ(sw.selected_path(), 1u);
  data.emit().execute();
  ctrl.emit().execute();
  const auto before = checksum(data.emit().output(0).frame().bytes());
  const TaskStatus st = sw.commute().execute();
  EXPECT_EQ(st.selected_path(), std::optional<std::size_t>(0));
  EXPECT_EQ(sw.selected_path(), 0u);
  EXPECT_EQ(&sw.commute_out(0).frame(), &data.emit().output(0).frame());
  EXPECT_EQ(checksum(sw.commute_out(0).frame().bytes()), before);
}

TEST(Commute, OutOfRangeControl) {
  for (std::int32_t bad : {5, 2, -1}) {
    Switcher sw("sw", 2, ElemKind::i32, 1);
    Constant data("data", 1), ctrl("ctrl", bad);
    bind(sw.commute_data(), data.emit().output(0));
    bind(sw.commute_ctrl(), ctrl.emit().output(0));
    ctrl.emit().execute();
    try {
      sw.commute().execute();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::path_out_of_range);
      EXPECT_EQ(e.subject(), sw.commute().id());
    }
  }
}

TEST(Select, InitialPathIsHighestThenFollowsCommute) {
  Switcher sw("sw", 2, ElemKind::i32, 1);
  Constant a("a", 10), b("b", 20), data("data", 0), ctrl("ctrl", 0);
  bind(sw.select_in(0), a.emit().output(0));
  bind(sw.select_in(1), b.emit().output(0));
  bind(sw.commute_data(), data.emit().output(0));
  bind(sw.commute_ctrl(), ctrl.emit().output(0));
  for (Task* t : {&a.emit(), &b.emit(), &data.emit(), &ctrl.emit()}) t->execute();

  EXPECT_EQ(sw.select().execute().selected_path(), std::optional<std::size_t>(1));
  EXPECT_EQ(sw.select_out().frame().as<std::int32_t>()[0], 20);
  sw.commute().execute();
  sw.select().execute();
  EXPECT_EQ(sw.select_out().frame().as<std::int32_t>()[0], 10);
  EXPECT_EQ(&sw.select_out().frame(), &a.emit().output(0).frame());
}

TEST(Select, UnboundSelectedInput) {
  Switcher sw("sw", 2, ElemKind::i32, 1);
  Constant a("a", 10);
  bind(sw.select_in(0), a.emit().output(0));
  try {
    sw.select().execute();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::selected_input_empty);
  }
}

TEST(Select, SinglePathIsIdentity) {
  Switcher sw("sw", 1, ElemKind::i32, 4);
  Constant a("a", 7, 4);
  bind(sw.select_in(0), a.emit().output(0));
  a.emit().execute();
  sw.select().execute();
  for (auto v : sw.select_out().frame().as<std::int32_t>()) EXPECT_EQ(v, 7);
}

TEST(Switcher, RejectsZeroPaths) {
  EXPECT_THROW(Switcher("sw", 0, ElemKind::u8, 1), Error);
  EXPECT_THROW(make_for_control("c", 0), Error);
  EXPECT_THROW(CyclicControl("c", 0, std::nullopt), Error);
}

std::vector<std::int32_t> emissions(ForLoopControl& c, int n) {
  std::vector<std::int32_t> out;
  for (int i = 0; i < n; ++i) {
    c.iterate().execute();
    out.push_back(c.ctrl().frame().as<std::int32_t>()[0]);
  }
  return out;
}

TEST(ForControl, TenIterationsThenExit) {
  auto c = make_for_control("c", 10);
  std::vector<std::int32_t> want(10, 0);
  want.push_back(1);
  EXPECT_EQ(emissions(*c, 11), want);
  EXPECT_EQ(emissions(*c, 11), want);
}

TEST(ForControl, SingleIteration) {
  auto c = make_for_control("c", 1);
  EXPECT_EQ(emissions(*c, 4), (std::vector<std::int32_t>{0, 1, 0, 1}));
}

TEST(CyclicControlTest, Cycles) {
  CyclicControl c("c", 3, std::nullopt);
  std::vector<std::int32_t> got;
  for (int i = 0; i < 7; ++i) {
    c.iterate().execute();
    got.push_back(c.ctrl().frame().as<std::int32_t>()[0]);
  }
  EXPECT_EQ(got, (std::vector<std::int32_t>{0, 1, 2, 0, 1, 2, 0}));
}

// counter -> commute(k=3, cyclic ctrl) -> path p adds 100*(p+1) -> select -> sink
struct SwitchGraph {
  Counter data{"data"};
  CyclicControl ctl{"ctl", 3, std::nullopt};
  Switcher sw{"sw", 3, ElemKind::i32, 1};
  Adder p0{"p0", 100}, p1{"p1", 200}, p2{"p2", 300};
  Collector sink{"sink"};

  SwitchGraph() {
    bind(sw.commute_data(), data.emit().output(0));
    bind(sw.commute_ctrl(), ctl.ctrl());
    Adder* paths[] = {&p0, &p1, &p2};
    for (std::size_t p = 0; p < 3; ++p) {
      bind(paths[p]->add().input(0), sw.commute_out(p));
      bind(sw.select_in(p), paths[p]->add().output(0));
    }
    bind(sink.take().input(0), sw.select_out());
  }
};

TEST(Switch, CyclicPathsAndExclusivity) {
  SwitchGraph g;
  Sequence s({&g.data.emit(), &g.ctl.iterate()});
  const auto& root = s.schedule()[0];
  EXPECT_EQ(root.kind, SubSequenceKind::switch_);
  EXPECT_EQ(root.successors.size(), 3u);
  s.enable_log(10000);
  s.exec_passes(9);
  EXPECT_EQ(g.sink.values, (std::vector<std::int32_t>{100, 201, 302, 103, 204, 305, 106, 207, 308}));
  EXPECT_EQ(g.sw.select().stats().exec_count, 9u);

  // Exactly one path task per pass, and the select reads that path.
  const TaskId path_ids[] = {g.p0.add().id(), g.p1.add().id(), g.p2.add().id()};
  std::map<std::uint64_t, int> per_pass;
  for (const auto& e : s.log())
    for (TaskId id : path_ids)
      if (e.task == id) ++per_pass[e.pass];
  ASSERT_EQ(per_pass.size(), 9u);
  for (const auto& [pass, n] : per_pass) EXPECT_EQ(n, 1) << pass;
}

TEST(Switch, SelectFollowsItsCommute) {
  SwitchGraph g;
  Sequence s({&g.data.emit(), &g.ctl.iterate()});
  for (int i = 0; i < 12; ++i) {
    s.run_pass();
    const std::size_t p = g.sw.selected_path();
    EXPECT_EQ(std::size_t(i % 3), p);
    EXPECT_EQ(&g.sw.select_out().frame(), &g.sw.select_in(p).frame());
  }
}

// init -> outer.sel -> octl -> outer.com; path 0 -> inner loop (5) around
// body; inner exit -> outer.sel.in0; outer exit -> sink.
TEST(Loop, NestedLoopEmissionCounts) {
  Counter init("init");
  Switcher outer("outer", 2, ElemKind::i32, 1), inner("inner", 2, ElemKind::i32, 1);
  auto octl = make_for_control("octl", 2, SocketShape{ElemKind::i32, 1});
  auto ictl = make_for_control("ictl", 5, SocketShape{ElemKind::i32, 1});
  Adder body("body", 1);
  Collector sink("sink");
  bind(outer.select_in(1), init.emit().output(0));
  bind(octl->iterate().input(0), outer.select_out());
  bind(outer.commute_data(), outer.select_out());
  bind(outer.commute_ctrl(), octl->ctrl());
  bind(inner.select_in(1), outer.commute_out(0));
  bind(ictl->iterate().input(0), inner.select_out());
  bind(inner.commute_data(), inner.select_out());
  bind(inner.commute_ctrl(), ictl->ctrl());
  bind(body.add().input(0), inner.commute_out(0));
  bind(inner.select_in(0), body.add().output(0));
  bind(outer.select_in(0), inner.commute_out(1));
  bind(sink.take().input(0), outer.commute_out(1));

  Sequence s({&init.emit()});
  s.exec_passes(4);
  EXPECT_EQ(ictl->iterate().stats().exec_count, 4u * 12u);
  EXPECT_EQ(octl->iterate().stats().exec_count, 4u * 3u);
  EXPECT_EQ(body.add().stats().exec_count, 4u * 10u);
  EXPECT_EQ(sink.values, (std::vector<std::int32_t>{10, 11, 12, 13}));
}

TEST(Loop, AbortResetsControlState) {
  Counter t1("t1");
  Switcher sw("sw", 2, ElemKind::i32, 1);
  auto ctl = make_for_control("ctl", 4, SocketShape{ElemKind::i32, 1});
  int calls = 0;
  // Aborts on the third body iteration of the first pass only.
  Gate body("body", [&calls](std::int32_t) { return ++calls == 3; });
  Collector out("out");
  bind(sw.select_in(1), t1.emit().output(0));
  bind(ctl->iterate().input(0), sw.select_out());
  bind(sw.commute_data(), sw.select_out());
  bind(sw.commute_ctrl(), ctl->ctrl());
  bind(body.pass().input(0), sw.commute_out(0));
  bind(sw.select_in(0), body.pass().output(0));
  bind(out.take().input(0), sw.commute_out(1));

  Sequence s({&t1.emit()});
  EXPECT_EQ(s.run_pass(), PassOutcome::aborted);
  EXPECT_EQ(sw.selected_path(), 1u);
  EXPECT_EQ(ctl->done(), 0u);
  EXPECT_EQ(s.run_pass(), PassOutcome::completed);
  // The aborting invocation counts as an execution.
  EXPECT_EQ(body.pass().stats().exec_count, 3u + 4u);
  EXPECT_EQ(out.values, (std::vector<std::int32_t>{1}));
}

TEST(Clone, StartsFromInitialPath) {
  Switcher sw("sw", 3, ElemKind::i32, 1);
  Constant data("data", 0), ctrl("ctrl", 0);
  bind(sw.commute_data(), data.emit().output(0));
  bind(sw.commute_ctrl(), ctrl.emit().output(0));
  ctrl.emit().execute();
  sw.commute().execute();
  ASSERT_EQ(sw.selected_path(), 0u);
  auto copy = sw.clone();
  auto* csw = dynamic_cast<Switcher*>(copy.get());
  ASSERT_NE(csw, nullptr);
  EXPECT_EQ(csw->selected_path(), 2u);
  EXPECT_EQ(csw->path_count(), 3u);
  EXPECT_EQ(sw.selected_path(), 0u);
}

// Routing never touches payload bytes, whatever the frame size.
TEST(SwitcherProperty, RoutedFramesKeepTheirChecksum) {
  std::mt19937 rng(5);
  for (int round = 0; round < 50; ++round) {
    const std::size_t count = 1 + rng() % 4096;
    const std::size_t k = 1 + rng() % 5;
    Switcher sw("sw", k, ElemKind::i32, count);
    Module src("src");
    Task& s = src.create_task("emit");
    s.create_output<std::int32_t>("out", count);
    s.set_codelet([&rng](Module&, Task& t) {
      for (auto& v : t.out<std::int32_t>(0)) v = std::int32_t(rng());
      return TaskStatus::ok();
    });
    Constant ctrl("ctrl", std::int32_t(rng() % k));
    bind(sw.commute_data(), s.output(0));
    bind(sw.commute_ctrl(), ctrl.emit().output(0));
    const std::size_t p = std::size_t(ctrl.value);
    bind(sw.select_in(p), sw.commute_out(p));
    s.execute();
    ctrl.emit().execute();
    const auto before = checksum(s.output(0).frame().bytes());
    sw.commute().execute();
    sw.select().execute();
    EXPECT_EQ(checksum(sw.select_out().frame().bytes()), before);
    EXPECT_EQ(&sw.select_out().frame(), &s.output(0).frame());
  }
}

}  // namespace
}  // namespace sigflow
