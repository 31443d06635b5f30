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

#include <algorithm>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "sigflow/graph.hpp"

namespace sigflow {
namespace {

using testing::Adder;
using testing::Counter;
using testing::Node;

TEST(Bind, FirstBindingRecordsSink) {
  Node t1("t1", 0, 1), t2("t2", 1, 0);
  bind(t2.in(0), t1.out(0));
  EXPECT_EQ(t2.in(0).source(), &t1.out(0));
  ASSERT_EQ(t1.out(0).sinks().size(), 1u);
  EXPECT_EQ(t1.out(0).sinks()[0], &t2.in(0));
}

TEST(Bind, InputRebindIsRejected) {
  Node t1("t1", 0, 1), t2("t2", 1, 0), t3("t3", 0, 1);
  bind(t2.in(0), t1.out(0));
  try {
    bind(t2.in(0), t3.out(0));
    FAIL() << "expected already_bound";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::already_bound);
  }
  EXPECT_EQ(t2.in(0).source(), &t1.out(0));
  EXPECT_TRUE(t3.out(0).sinks().empty());
}

TEST(Bind, OutputFansOutInBindingOrder) {
  Node t1("t1", 0, 1), t2("t2", 1, 0), t4("t4", 1, 0);
  bind(t2.in(0), t1.out(0));
  bind(t4.in(0), t1.out(0));
  const auto& sinks = t1.out(0).sinks();
  ASSERT_EQ(sinks.size(), 2u);
  EXPECT_EQ(sinks[0], &t2.in(0));
  EXPECT_EQ(sinks[1], &t4.in(0));
}

TEST(Bind, KindAndCountMustAgree) {
  Module m("m");
  Task& a = m.create_task("a");
  Socket& f = a.create_output<float>("f", 4);
  Socket& i4 = a.create_output<std::int32_t>("i4", 4);
  Module n("n");
  Task& b = n.create_task("b");
  Socket& in = b.create_input<std::int32_t>("in", 3);
  for (Socket* out : {&f, &i4}) {
    try {
      bind(in, *out);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::type_mismatch);
    }
  }
  EXPECT_FALSE(in.is_bound());
}

TEST(Bind, SameTaskIsRejected) {
  Node t("t", 1, 1);
  try {
    bind(t.in(0), t.out(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::self_bind);
  }
}

TEST(Bind, DirectionsAreChecked) {
  Node a("a", 1, 1), b("b", 1, 1);
  EXPECT_THROW(bind(a.out(0), b.out(0)), Error);
  EXPECT_THROW(bind(a.in(0), b.in(0)), Error);
}

TEST(Bind, UnbindRemovesBothSides) {
  Node t1("t1", 0, 1), t2("t2", 1, 0);
  bind(t2.in(0), t1.out(0));
  unbind(t2.in(0));
  EXPECT_FALSE(t2.in(0).is_bound());
  EXPECT_TRUE(t1.out(0).sinks().empty());
  unbind(t2.in(0));  // no-op
  bind(t2.in(0), t1.out(0));
  EXPECT_TRUE(t2.in(0).is_bound());
}

TEST(Bind, DestroyingAModuleDetachesItsSockets) {
  Node t1("t1", 0, 1);
  {
    Node t2("t2", 1, 0);
    bind(t2.in(0), t1.out(0));
  }
  EXPECT_TRUE(t1.out(0).sinks().empty());
}

TEST(Execute, IdentityForwardsValues) {
  Module src("src");
  Task& s = src.create_task("emit");
  s.create_output<std::int32_t>("out", 3);
  s.set_codelet([](Module&, Task& t) {
    auto o = t.out<std::int32_t>(0);
    o[0] = 1, o[1] = 2, o[2] = 3;
    return TaskStatus::ok();
  });
  Adder id("id", 0, 3);
  bind(id.add().input(0), s.output(0));
  EXPECT_EQ(s.execute(), TaskStatus::ok());
  EXPECT_EQ(id.add().execute(), TaskStatus::ok());
  const auto out = id.add().output(0).frame().as<std::int32_t>();
  EXPECT_EQ(std::vector<std::int32_t>(out.begin(), out.end()), (std::vector<std::int32_t>{1, 2, 3}));
}

TEST(Execute, AbortIsAStatusNotAnError) {
  Module m("m");
  Task& a = m.create_task("a");
  a.set_codelet([](Module&, Task&) { return TaskStatus::abort(); });
  Task& b = m.create_task("b");
  b.set_codelet([](Module&, Task&) -> TaskStatus { throw AbortSignal(); });
  EXPECT_TRUE(a.execute().aborted());
  EXPECT_TRUE(b.execute().aborted());
}

TEST(Execute, UnboundInputIsReported) {
  Node t("t", 2, 0);
  Node p("p", 0, 1);
  bind(t.in(0), p.out(0));
  EXPECT_FALSE(t.run().can_execute());
  try {
    t.run().execute();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unbound_input);
  }
}

TEST(Execute, BodyFailureCarriesTaskId) {
  Module m("m");
  Task& t = m.create_task("boom");
  t.set_codelet([](Module&, Task&) -> TaskStatus { throw std::runtime_error("disk on fire"); });
  try {
    t.execute();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::task_failure);
    ASSERT_TRUE(e.subject().has_value());
    EXPECT_EQ(*e.subject(), t.id());
    EXPECT_NE(std::string(e.what()).find("m.boom"), std::string::npos);
  }
}

TEST(Execute, ExecCountAndTiming) {
  Counter c;
  for (int i = 0; i < 7; ++i) c.emit().execute();
  EXPECT_EQ(c.emit().stats().exec_count, 7u);
  c.emit().reset_stats();
  c.emit().set_timing(false);
  c.emit().execute();
  EXPECT_EQ(c.emit().stats().exec_count, 1u);
  EXPECT_EQ(c.emit().stats().total_ns, 0u);
}

TEST(Frame, TypedViewsCheckKind) {
  FrameBuffer f(ElemKind::f32, 8);
  EXPECT_EQ(f.size_bytes(), 32u);
  EXPECT_EQ(f.as<float>().size(), 8u);
  EXPECT_THROW(f.as<std::int32_t>(), Error);
  FrameBuffer g(ElemKind::f32, 8);
  f.as<float>()[3] = 2.5f;
  f.set_generation(9);
  g.copy_from(f);
  EXPECT_EQ(g.as<float>()[3], 2.5f);
  EXPECT_EQ(g.generation(), 9u);
  FrameBuffer h(ElemKind::f32, 7);
  EXPECT_THROW(h.copy_from(f), Error);
}

TEST(Introspection, InputOrderIsDeclarationOrder) {
  Node t("t", 3, 0);
  Node a("a", 0, 1), b("b", 0, 1), c("c", 0, 1);
  bind(t.in(2), c.out(0));
  bind(t.in(0), a.out(0));
  bind(t.in(1), b.out(0));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(t.run().input(i).index(), i);
    EXPECT_EQ(t.run().input(i).name(), "in" + std::to_string(i));
  }
  EXPECT_EQ(&t.run()["in1"], &t.in(1));
}

TEST(Introspection, DumpIsDeterministic) {
  auto build = [] {
    auto a = std::make_unique<Node>("a", 0, 1);
    auto b = std::make_unique<Node>("b", 1, 1);
    auto c = std::make_unique<Node>("c", 2, 0);
    bind(b->in(0), a->out(0));
    bind(c->in(0), a->out(0));
    bind(c->in(1), b->out(0));
    std::vector<const Module*> mods{a.get(), b.get(), c.get()};
    std::string text = dump_graph(mods);
    return text;
  };
  const std::string first = build();
  EXPECT_EQ(first, build());
  EXPECT_NE(first.find("digraph"), std::string::npos);
  EXPECT_NE(first.find("a.run"), std::string::npos);
}

// Random graphs: the audit stays clean, every input has at most one source,
// and no output lists a sink twice.
TEST(GraphProperty, RandomBindingsKeepInvariants) {
  std::mt19937 rng(12345);
  for (int round = 0; round < 100; ++round) {
    const int n = 2 + int(rng() % 10);
    std::vector<std::unique_ptr<Module>> mods;
    for (int i = 0; i < n; ++i) {
      Module& m = *mods.emplace_back(std::make_unique<Module>("m" + std::to_string(i)));
      Task& t = m.create_task("t");
      const std::size_t count = 1 + rng() % 3;
      for (int k = 0; k < 3; ++k) t.create_input<std::int32_t>("i" + std::to_string(k), count);
      for (int k = 0; k < 2; ++k) t.create_output<std::int32_t>("o" + std::to_string(k), count);
    }
    for (int attempt = 0; attempt < 40; ++attempt) {
      Task& a = mods[rng() % n]->task(0);
      Task& b = mods[rng() % n]->task(0);
      Socket& in = a.input(rng() % 3);
      Socket& out = b.output(rng() % 2);
      const bool ok_expected = !in.is_bound() && &a != &b && in.count() == out.count();
      bool ok = true;
      try {
        bind(in, out);
      } catch (const Error&) {
        ok = false;
      }
      ASSERT_EQ(ok, ok_expected);
      if (rng() % 5 == 0) unbind(a.input(rng() % 3));
    }
    std::vector<const Module*> view;
    for (auto& m : mods) view.push_back(m.get());
    EXPECT_TRUE(audit_bindings(view).empty());
    for (auto& m : mods) {
      for (std::size_t o = 0; o < 2; ++o) {
        auto sinks = m->task(0).output(o).sinks();
        std::sort(sinks.begin(), sinks.end());
        EXPECT_EQ(std::adjacent_find(sinks.begin(), sinks.end()), sinks.end());
        for (Socket* s : sinks) EXPECT_EQ(s->source(), &m->task(0).output(o));
      }
    }
  }
}

// A standard task never mutates the frames on its inputs.
TEST(GraphProperty, InputsAreNotMutated) {
  std::mt19937 rng(7);
  for (int round = 0; round < 200; ++round) {
    const std::size_t count = 1 + rng() % 64;
    Module src("src");
    Task& s = src.create_task("emit");
    s.create_output<std::int32_t>("out", count);
    s.set_codelet([&rng](Module&, Task& t) {
      for (auto& v : t.out<std::int32_t>(0)) v = std::int32_t(rng());
      return TaskStatus::ok();
    });
    Adder add("add", std::int32_t(rng() % 100), count);
    bind(add.add().input(0), s.output(0));
    s.execute();
    const auto before = checksum(s.output(0).frame().bytes());
    add.add().execute();
    EXPECT_EQ(checksum(s.output(0).frame().bytes()), before);
  }
}

TEST(GraphProperty, GenerationIncreasesAlongASocket) {
  Counter c;
  Adder a("a", 1);
  bind(a.add().input(0), c.emit().output(0));
  std::uint64_t last = 0;
  for (int i = 0; i < 50; ++i) {
    c.emit().execute();
    a.add().execute();
    const auto g = a.add().output(0).frame().generation();
    if (i > 0) EXPECT_GT(g, last);
    last = g;
  }
}

TEST(Module, SequentialOnlyRefusesClone) {
  Module m("seq", Cloneability::sequential_only);
  try {
    m.clone();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_cloneable);
  }
}

TEST(Module, CloneCopiesStructureUnbound) {
  Counter c;
  Adder a("a", 5);
  bind(a.add().input(0), c.emit().output(0));
  auto copy = a.clone();
  ASSERT_EQ(copy->task_count(), 1u);
  EXPECT_EQ(copy->name(), "a");
  EXPECT_NE(copy->id(), a.id());
  EXPECT_FALSE(copy->task(0).input(0).is_bound());
  EXPECT_NE(copy->task(0).id(), a.add().id());
}

}  // namespace
}  // namespace sigflow
