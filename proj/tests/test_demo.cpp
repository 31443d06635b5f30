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

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sigflow/demo.hpp"
#include "sigflow/plan_config.hpp"

namespace sigflow::demo {
namespace {

ChainConfig small(std::uint64_t frames = 200) {
  ChainConfig c;
  c.k = 64;
  c.frames = frames;
  c.seed = 11;
  return c;
}

TEST(Config, Validation) {
  ChainConfig c;
  c.k = 0;
  EXPECT_THROW(validate(c), Error);
  c.k = 8;
  for (std::size_t bad : {0u, 2u, 4u}) {
    c.rep = bad;
    try {
      validate(c);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::invalid_argument);
    }
  }
  c.rep = 5;
  EXPECT_NO_THROW(validate(c));
  EXPECT_THROW(Chain{ChainConfig{0}}, Error);
}

TEST(Config, NoiseDeviation) {
  ChainConfig c;
  c.rep = 1;
  c.ebn0_db = 0.0;
  EXPECT_NEAR(noise_sigma(c), std::sqrt(0.5), 1e-12);
  c.rep = 3;
  c.ebn0_db = 10.0;
  EXPECT_NEAR(noise_sigma(c), std::sqrt(1.0 / 60.0), 1e-12);
  c.noiseless = true;
  EXPECT_EQ(noise_sigma(c), 0.0);
  c.sigma = 0.25;
  EXPECT_EQ(noise_sigma(c), 0.25);
}

TEST(Chain, NoiselessUncodedIsIdentity) {
  ChainConfig c = small(50);
  c.rep = 1;
  c.noiseless = true;
  Chain chain(c);
  const ChainResult r = run_chain(chain, std::nullopt);
  EXPECT_EQ(r.frames, 50u);
  EXPECT_EQ(r.bit_errors, 0u);

  // Oracle: a lone source with the same seed.
  Source src(c.k, c.seed);
  std::vector<std::uint8_t> want;
  for (int f = 0; f < 50; ++f) {
    src.generate().execute();
    for (auto b : src.generate().output(0).frame().as<std::uint8_t>()) want.push_back(b);
  }
  EXPECT_EQ(chain.sink().bytes(), want);
}

TEST(Chain, HighSnrRepetitionHasNoFrameErrors) {
  ChainConfig c = small(10'000);
  c.rep = 3;
  c.ebn0_db = 10.0;
  const ChainResult r = run_sequential(c);
  EXPECT_EQ(r.frames, 10'000u);
  EXPECT_EQ(r.frame_errors, 0u);
  EXPECT_EQ(r.fer, 0.0);
}

TEST(Chain, IntrospectionShowsTheCleanupLoop) {
  Chain chain(small());
  Sequence seq({&chain.source().generate()});
  const SubSequence* head = nullptr;
  for (const auto& n : seq.schedule())
    if (n.kind == SubSequenceKind::loop) head = &n;
  ASSERT_NE(head, nullptr);
  ASSERT_EQ(head->tasks.size(), 3u);
  EXPECT_EQ(head->tasks[0], &chain.loop().select());
  EXPECT_EQ(head->tasks[1], &chain.loop_control().iterate());
  EXPECT_EQ(head->tasks[2], &chain.loop().commute());
  ASSERT_EQ(head->successors.size(), 2u);
  const auto& body = seq.schedule()[head->successors[0]];
  ASSERT_EQ(body.tasks.size(), 1u);
  EXPECT_EQ(body.tasks[0], &chain.cleanup().clip());
  const auto& exit = seq.schedule()[head->successors[1]];
  EXPECT_EQ(exit.tasks.front(), &chain.decoder().decode());
  EXPECT_EQ(exit.tasks.back(), &chain.sink().store());
  const std::string dump = seq.dump();
  EXPECT_NE(dump.find("loop.select"), std::string::npos);
  EXPECT_NE(dump.find("cleanup.clip"), std::string::npos);

  seq.exec_passes(4);
  EXPECT_EQ(chain.loop().select().stats().exec_count, 4u * 3u);
  EXPECT_EQ(chain.cleanup().clip().stats().exec_count, 4u * 2u);
}

TEST(Chain, PipelinedMatchesSequential) {
  ChainConfig c = small(400);
  c.ebn0_db = 1.0;
  const ChainResult seq = run_sequential(c);
  EXPECT_GT(seq.bit_errors, 0u);
  for (std::size_t workers : {1u, 2u, 3u, 5u})
    for (std::size_t cap : {1u, 4u})
      for (CopyMode copy : {CopyMode::deep_copy, CopyMode::copyless}) {
        Chain chain(c);
        const ChainResult r = run_chain(chain, chain.default_plan(workers, cap, copy));
        EXPECT_EQ(r.sink_hash, seq.sink_hash) << workers << '/' << cap;
        EXPECT_EQ(r.bit_errors, seq.bit_errors);
        EXPECT_EQ(r.frame_errors, seq.frame_errors);
        ASSERT_TRUE(r.stages.has_value());
        EXPECT_EQ(r.stages->stages.size(), 4u);
        EXPECT_EQ(chain.sink().generations().size(), 400u);
        for (std::size_t g = 0; g < 400; ++g) ASSERT_EQ(chain.sink().generations()[g], g);
      }
}

TEST(Chain, ReplicatingTheWhitenerIsRefused) {
  Chain chain(small());
  PipelinePlan plan = chain.default_plan();
  plan.stages[1].workers = 2;
  try {
    Pipeline p(plan);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_cloneable);
    EXPECT_NE(std::string(e.what()).find("whitener"), std::string::npos);
  }
}

TEST(Chain, PlanFileRoundTrip) {
  ChainConfig c = small(100);
  Chain a(c);
  const std::string path = ::testing::TempDir() + "/demo_plan.json";
  {
    std::ofstream f(path);
    f << plan_to_json(a.default_plan(2, 2, CopyMode::copyless));
  }
  const auto mods = a.modules();
  const PipelinePlan plan = load_plan_file(path, mods);
  EXPECT_EQ(plan.stages.size(), 4u);
  EXPECT_EQ(plan.stages[2].workers, 2u);
  const ChainResult r = run_chain(a, plan);
  EXPECT_EQ(r.sink_hash, run_sequential(c).sink_hash);
  std::remove(path.c_str());
}

// Uncoded BPSK against the closed form, at a unit-test size.
TEST(Statistics, UncodedBerMatchesClosedForm) {
  ChainConfig c;
  c.k = 500;
  c.rep = 1;
  c.ebn0_db = 4.0;
  c.frames = 400;
  c.seed = 5;
  const ChainResult r = run_sequential(c);
  const double p = 0.5 * std::erfc(std::sqrt(std::pow(10.0, 0.4)));
  const double n = double(c.k * c.frames);
  EXPECT_NEAR(r.ber, p, 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Statistics, RepetitionNotWorseAtEqualNoise) {
  for (double sigma : {0.6, 0.8, 1.0}) {
    ChainConfig c = small(500);
    c.sigma = sigma;
    c.rep = 1;
    const double uncoded = run_sequential(c).ber;
    c.rep = 3;
    const double coded = run_sequential(c).ber;
    EXPECT_LE(coded, uncoded) << sigma;
    EXPECT_GE(uncoded, 0.0);
    EXPECT_LE(uncoded, 1.0);
  }
}

TEST(Output, SummaryLine) {
  ChainConfig c = small(20);
  const ChainResult r = run_sequential(c);
  const std::string line = summary_line(c, r);
  EXPECT_NE(line.find("frames=20"), std::string::npos) << line;
  EXPECT_NE(line.find("fer="), std::string::npos);
  EXPECT_NE(line.find("sink="), std::string::npos);
}

}  // namespace
}  // namespace sigflow::demo
