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

#include "sigflow/demo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace sigflow::demo {

namespace {

std::uint64_t splitmix(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  return splitmix(splitmix(seed ^ splitmix(stream)) + index);
}

constexpr std::uint64_t kSourceStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

}  // namespace

void validate(const ChainConfig& cfg) {
  if (cfg.k == 0) throw Error(Errc::invalid_argument, "frame size k must be at least 1");
  if (cfg.rep == 0 || cfg.rep % 2 == 0)
    throw Error(Errc::invalid_argument, "repetition factor must be odd, got " + std::to_string(cfg.rep));
  if (cfg.cleanup_iterations == 0) throw Error(Errc::invalid_argument, "cleanup loop needs at least one iteration");
  if (cfg.sigma && *cfg.sigma < 0) throw Error(Errc::invalid_argument, "noise deviation must not be negative");
}

double noise_sigma(const ChainConfig& cfg) {
  if (cfg.sigma) return *cfg.sigma;
  if (cfg.noiseless) return 0.0;
  const double ebn0 = std::pow(10.0, cfg.ebn0_db / 10.0);
  return std::sqrt(1.0 / (2.0 * double(cfg.rep) * ebn0));
}

Source::Source(std::size_t k, std::uint64_t seed) : CloneableModule("source"), seed_(seed) {
  Task& t = create_task("generate");
  t.create_output<std::uint8_t>("bits", k);
  t.set_codelet(make_codelet<Source>([](Source& m, Task& t) {
    std::mt19937_64 rng(mix(m.seed_, kSourceStream, m.frame_++));
    auto out = t.out<std::uint8_t>(0);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (i % 64 == 0) word = rng();
      out[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
    }
    return TaskStatus::ok();
  }));
}

Encoder::Encoder(std::size_t k, std::size_t rep) : CloneableModule("encoder"), rep_(rep) {
  Task& t = create_task("encode");
  t.create_input<std::uint8_t>("bits", k);
  t.create_output<std::uint8_t>("code", k * rep);
  t.set_codelet(make_codelet<Encoder>([](Encoder& m, Task& t) {
    const auto in = t.in<std::uint8_t>(0);
    auto out = t.out<std::uint8_t>(0);
    for (std::size_t i = 0; i < in.size(); ++i) std::fill_n(out.begin() + i * m.rep_, m.rep_, in[i]);
    return TaskStatus::ok();
  }));
}

Modulator::Modulator(std::size_t n) : CloneableModule("modulator") {
  Task& t = create_task("modulate");
  t.create_input<std::uint8_t>("code", n);
  t.create_output<float>("symbols", n);
  t.set_codelet([](Module&, Task& t) {
    const auto in = t.in<std::uint8_t>(0);
    auto out = t.out<float>(0);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] ? -1.0f : 1.0f;
    return TaskStatus::ok();
  });
}

Whitener::Whitener(std::string name, std::size_t n, std::uint16_t seed)
    : Module(std::move(name), Cloneability::sequential_only), state_(seed ? seed : 0xACE1u) {
  Task& t = create_task("apply");
  t.create_input<float>("in", n);
  t.create_output<float>("out", n);
  t.set_codelet(make_codelet<Whitener>([](Whitener& m, Task& t) {
    const auto in = t.in<float>(0);
    auto out = t.out<float>(0);
    std::uint16_t s = m.state_;
    for (std::size_t i = 0; i < in.size(); ++i) {
      // x^16 + x^14 + x^13 + x^11 + 1
      const std::uint16_t bit = ((s >> 0) ^ (s >> 2) ^ (s >> 3) ^ (s >> 5)) & 1u;
      s = static_cast<std::uint16_t>((s >> 1) | (bit << 15));
      out[i] = (s & 1u) ? -in[i] : in[i];
    }
    m.state_ = s;
    return TaskStatus::ok();
  }));
}

Channel::Channel(std::size_t n, double sigma, std::uint64_t seed)
    : CloneableModule("channel"), sigma_(sigma), seed_(seed) {
  Task& t = create_task("add_noise");
  t.create_input<float>("in", n);
  t.create_output<float>("out", n);
  t.set_codelet(make_codelet<Channel>([](Channel& m, Task& t) {
    const auto in = t.in<float>(0);
    auto out = t.out<float>(0);
    if (m.sigma_ == 0.0) {
      std::copy(in.begin(), in.end(), out.begin());
      return TaskStatus::ok();
    }
    std::mt19937_64 rng(mix(m.seed_, kNoiseStream, t.in_frame(0).generation()));
    std::normal_distribution<double> noise(0.0, m.sigma_);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = static_cast<float>(double(in[i]) + noise(rng));
    return TaskStatus::ok();
  }));
}

Demodulator::Demodulator(std::size_t n, double sigma)
    : CloneableModule("demodulator"), scale_(sigma > 0 ? float(2.0 / (sigma * sigma)) : 2.0f) {
  Task& t = create_task("demodulate");
  t.create_input<float>("symbols", n);
  t.create_output<float>("llr", n);
  t.set_codelet(make_codelet<Demodulator>([](Demodulator& m, Task& t) {
    const auto in = t.in<float>(0);
    auto out = t.out<float>(0);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = m.scale_ * in[i];
    return TaskStatus::ok();
  }));
}

LlrCleanup::LlrCleanup(std::size_t n, float limit) : CloneableModule("cleanup"), limit_(limit) {
  Task& t = create_task("clip");
  t.create_input<float>("in", n);
  t.create_output<float>("out", n);
  t.set_codelet(make_codelet<LlrCleanup>([](LlrCleanup& m, Task& t) {
    const auto in = t.in<float>(0);
    auto out = t.out<float>(0);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::clamp(in[i], -m.limit_, m.limit_);
    return TaskStatus::ok();
  }));
}

Decoder::Decoder(std::size_t k, std::size_t rep) : CloneableModule("decoder"), rep_(rep) {
  Task& t = create_task("decode");
  t.create_input<float>("llr", k * rep);
  t.create_output<std::uint8_t>("bits", k);
  t.set_codelet(make_codelet<Decoder>([](Decoder& m, Task& t) {
    const auto in = t.in<float>(0);
    auto out = t.out<std::uint8_t>(0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::size_t ones = 0;
      for (std::size_t j = 0; j < m.rep_; ++j) ones += in[i * m.rep_ + j] < 0.0f;
      out[i] = ones * 2 > m.rep_ ? 1 : 0;
    }
    return TaskStatus::ok();
  }));
}

Monitor::Monitor(std::size_t k) : Module("monitor", Cloneability::sequential_only), k_(k) {
  Task& t = create_task("check");
  t.create_input<std::uint8_t>("ref", k);
  t.create_input<std::uint8_t>("bits", k);
  t.create_output<std::uint8_t>("out", k);
  t.set_codelet(make_codelet<Monitor>([](Monitor& m, Task& t) {
    const auto ref = t.in<std::uint8_t>(0);
    const auto bits = t.in<std::uint8_t>(1);
    auto out = t.out<std::uint8_t>(0);
    std::uint64_t errors = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      errors += ref[i] != bits[i];
      out[i] = bits[i];
    }
    ++m.frames_;
    m.bit_errors_ += errors;
    m.frame_errors_ += errors != 0;
    return TaskStatus::ok();
  }));
}

Sink::Sink(std::size_t k) : Module("sink", Cloneability::sequential_only) {
  Task& t = create_task("store");
  t.create_input<std::uint8_t>("bits", k);
  t.set_codelet(make_codelet<Sink>([](Sink& m, Task& t) {
    const auto in = t.in<std::uint8_t>(0);
    for (std::uint8_t b : in) {
      m.bytes_.push_back(b);
      m.hash_ = (m.hash_ ^ b) * 1099511628211ull;
    }
    m.generations_.push_back(t.in_frame(0).generation());
    ++m.frames_;
    return TaskStatus::ok();
  }));
}

Chain::Chain(const ChainConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  const std::size_t k = cfg_.k;
  const std::size_t n = cfg_.k * cfg_.rep;
  const double sigma = noise_sigma(cfg_);
  const auto lfsr_seed = static_cast<std::uint16_t>(splitmix(cfg_.seed) | 1u);

  source_ = std::make_unique<Source>(k, cfg_.seed);
  encoder_ = std::make_unique<Encoder>(k, cfg_.rep);
  modulator_ = std::make_unique<Modulator>(n);
  scrambler_ = std::make_unique<Whitener>("scrambler", n, lfsr_seed);
  channel_ = std::make_unique<Channel>(n, sigma, cfg_.seed);
  whitener_ = std::make_unique<Whitener>("whitener", n, lfsr_seed);
  demodulator_ = std::make_unique<Demodulator>(n, sigma);
  loop_ = std::make_unique<Switcher>("loop", 2, ElemKind::f32, n);
  loop_ctl_ = std::make_unique<ForLoopControl>("loop_ctl", cfg_.cleanup_iterations, SocketShape{ElemKind::f32, n});
  cleanup_ = std::make_unique<LlrCleanup>(n, 50.0f);
  decoder_ = std::make_unique<Decoder>(k, cfg_.rep);
  monitor_ = std::make_unique<Monitor>(k);
  sink_ = std::make_unique<Sink>(k);

  bind(encoder_->encode().input(0), source_->generate().output(0));
  bind(modulator_->modulate().input(0), encoder_->encode().output(0));
  bind(scrambler_->apply().input(0), modulator_->modulate().output(0));
  bind(channel_->add_noise().input(0), scrambler_->apply().output(0));
  bind(whitener_->apply().input(0), channel_->add_noise().output(0));
  bind(demodulator_->demodulate().input(0), whitener_->apply().output(0));
  bind(loop_->select_in(1), demodulator_->demodulate().output(0));
  bind(loop_ctl_->iterate().input(0), loop_->select_out());
  bind(loop_->commute_data(), loop_->select_out());
  bind(loop_->commute_ctrl(), loop_ctl_->ctrl());
  bind(cleanup_->clip().input(0), loop_->commute_out(0));
  bind(loop_->select_in(0), cleanup_->clip().output(0));
  bind(decoder_->decode().input(0), loop_->commute_out(1));
  bind(monitor_->check().input(0), source_->generate().output(0));
  bind(monitor_->check().input(1), decoder_->decode().output(0));
  bind(sink_->store().input(0), monitor_->check().output(0));
}

std::vector<Module*> Chain::modules() const {
  return {source_.get(),      encoder_.get(), modulator_.get(), scrambler_.get(), channel_.get(),
          whitener_.get(),    demodulator_.get(), loop_.get(),  loop_ctl_.get(),  cleanup_.get(),
          decoder_.get(),     monitor_.get(), sink_.get()};
}

PipelinePlan Chain::default_plan(std::size_t decode_workers, std::size_t capacity, CopyMode copy) const {
  PipelinePlan p;
  p.entry = &source_->generate();
  p.stages = {StageSpec{{&source_->generate()}, {&channel_->add_noise()}, 1, {}},
              StageSpec{{&whitener_->apply()}, {&whitener_->apply()}, 1, {}},
              StageSpec{{&demodulator_->demodulate()}, {&decoder_->decode()}, decode_workers, {}},
              StageSpec{{&monitor_->check()}, {}, 1, {}}};
  p.buffer_capacity = capacity;
  p.copy_mode = copy;
  return p;
}

ChainResult run_chain(Chain& chain, const std::optional<PipelinePlan>& plan) {
  ChainResult r;
  const std::uint64_t frames = chain.config().frames;
  if (plan) {
    Pipeline p(*plan);
    PipelineStats st = p.exec_frames(frames);
    r.wall_s = st.wall_s;
    r.stages = std::move(st);
  } else {
    Sequence seq({&chain.source().generate()});
    const ExecStats es = seq.exec_passes(frames);
    r.wall_s = double(es.wall_ns) / 1e9;
  }
  const Monitor& m = chain.monitor();
  r.frames = m.frames_seen();
  r.frame_errors = m.frame_errors();
  r.bit_errors = m.bit_errors();
  r.fer = m.fer();
  r.ber = m.ber();
  r.throughput_mbps = r.wall_s > 0 ? double(r.frames * chain.config().k) / r.wall_s / 1e6 : 0.0;
  r.sink_hash = chain.sink().hash();
  return r;
}

ChainResult run_sequential(const ChainConfig& cfg) {
  Chain chain(cfg);
  return run_chain(chain, std::nullopt);
}

ChainResult run_pipelined(const ChainConfig& cfg, std::size_t decode_workers, std::size_t capacity, CopyMode copy) {
  Chain chain(cfg);
  return run_chain(chain, chain.default_plan(decode_workers, capacity, copy));
}

std::string summary_line(const ChainConfig& cfg, const ChainResult& r) {
  std::ostringstream os;
  os << "k=" << cfg.k << " rep=" << cfg.rep << " ebn0=" << cfg.ebn0_db << "dB frames=" << r.frames
     << " frame_errors=" << r.frame_errors << " bit_errors=" << r.bit_errors << std::scientific
     << std::setprecision(4) << " fer=" << r.fer << " ber=" << r.ber << std::fixed << std::setprecision(3)
     << " throughput=" << r.throughput_mbps << "Mbps wall=" << r.wall_s << "s sink=" << std::hex << std::setw(16)
     << std::setfill('0') << r.sink_hash;
  return os.str();
}

}  // namespace sigflow::demo
