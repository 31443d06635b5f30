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

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sigflow/graph.hpp"
#include "sigflow/pipeline.hpp"
#include "sigflow/sequence.hpp"
#include "sigflow/switcher.hpp"

namespace sigflow::demo {

struct ChainConfig {
  std::size_t k = 128;        // information bits per frame
  std::size_t rep = 3;        // repetition factor, odd
  double ebn0_db = 4.0;
  bool noiseless = false;
  /// Replaces the Eb/N0-derived noise deviation when set.
  std::optional<double> sigma;
  std::uint64_t seed = 1;
  std::uint64_t frames = 1000;
  std::size_t cleanup_iterations = 2;
};

/// Throws invalid_argument for k == 0, rep == 0 or an even rep.
void validate(const ChainConfig& cfg);
/// Noise standard deviation per real dimension.
double noise_sigma(const ChainConfig& cfg);

/// Pseudo-random frame of bits; frame f depends only on (seed, f).
class Source : public CloneableModule<Source> {
 public:
  Source(std::size_t k, std::uint64_t seed);
  Task& generate() const { return task(0); }

 private:
  std::uint64_t seed_;
  std::uint64_t frame_ = 0;
};

class Encoder : public CloneableModule<Encoder> {
 public:
  Encoder(std::size_t k, std::size_t rep);
  Task& encode() const { return task(0); }

 private:
  std::size_t rep_;
};

/// BPSK: bit 0 -> +1, bit 1 -> -1.
class Modulator : public CloneableModule<Modulator> {
 public:
  explicit Modulator(std::size_t n);
  Task& modulate() const { return task(0); }
};

/// Multiplies symbols by a +-1 LFSR stream that persists across frames.
/// Used as the transmit scrambler and as the receive whitener (same seed).
class Whitener : public Module {
 public:
  Whitener(std::string name, std::size_t n, std::uint16_t seed);
  Task& apply() const { return task(0); }
  std::uint16_t state() const noexcept { return state_; }

 private:
  std::uint16_t state_;
};

/// Additive white Gaussian noise; the noise of a frame is seeded by the
/// channel seed and the frame generation only.
class Channel : public CloneableModule<Channel> {
 public:
  Channel(std::size_t n, double sigma, std::uint64_t seed);
  Task& add_noise() const { return task(0); }

 private:
  double sigma_;
  std::uint64_t seed_;
};

/// LLR = 2y / sigma^2.
class Demodulator : public CloneableModule<Demodulator> {
 public:
  Demodulator(std::size_t n, double sigma);
  Task& demodulate() const { return task(0); }

 private:
  float scale_;
};

/// Clips LLRs to +-limit.
class LlrCleanup : public CloneableModule<LlrCleanup> {
 public:
  LlrCleanup(std::size_t n, float limit);
  Task& clip() const { return task(0); }

 private:
  float limit_;
};

/// Majority vote over the rep hard decisions of each bit.
class Decoder : public CloneableModule<Decoder> {
 public:
  Decoder(std::size_t k, std::size_t rep);
  Task& decode() const { return task(0); }

 private:
  std::size_t rep_;
};

/// Compares decoded bits against the reference and forwards the decoded
/// frame.
class Monitor : public Module {
 public:
  explicit Monitor(std::size_t k);
  Task& check() const { return task(0); }

  std::uint64_t frames_seen() const noexcept { return frames_; }
  std::uint64_t frame_errors() const noexcept { return frame_errors_; }
  std::uint64_t bit_errors() const noexcept { return bit_errors_; }
  double fer() const noexcept { return frames_ ? double(frame_errors_) / double(frames_) : 0.0; }
  double ber() const noexcept { return frames_ ? double(bit_errors_) / double(frames_ * k_) : 0.0; }

 private:
  std::size_t k_;
  std::uint64_t frames_ = 0;
  std::uint64_t frame_errors_ = 0;
  std::uint64_t bit_errors_ = 0;
};

/// Stores every received frame; keeps an FNV-1a hash of the byte stream.
class Sink : public Module {
 public:
  explicit Sink(std::size_t k);
  Task& store() const { return task(0); }

  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
  std::uint64_t hash() const noexcept { return hash_; }
  std::uint64_t frames() const noexcept { return frames_; }
  const std::vector<std::uint64_t>& generations() const noexcept { return generations_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::vector<std::uint64_t> generations_;
  std::uint64_t hash_ = 1469598103934665603ull;
  std::uint64_t frames_ = 0;
};

/// source -> encoder -> modulator -> scrambler -> channel -> whitener ->
/// demodulator -> cleanup loop -> decoder -> monitor -> sink.
class Chain {
 public:
  explicit Chain(const ChainConfig& cfg);

  const ChainConfig& config() const noexcept { return cfg_; }
  std::vector<Module*> modules() const;

  Source& source() const { return *source_; }
  Encoder& encoder() const { return *encoder_; }
  Modulator& modulator() const { return *modulator_; }
  Whitener& scrambler() const { return *scrambler_; }
  Channel& channel() const { return *channel_; }
  Whitener& whitener() const { return *whitener_; }
  Demodulator& demodulator() const { return *demodulator_; }
  Switcher& loop() const { return *loop_; }
  ForLoopControl& loop_control() const { return *loop_ctl_; }
  LlrCleanup& cleanup() const { return *cleanup_; }
  Decoder& decoder() const { return *decoder_; }
  Monitor& monitor() const { return *monitor_; }
  Sink& sink() const { return *sink_; }

  /// Four stages: transmitter + channel | whitener | demodulator .. decoder
  /// (replicated) | monitor + sink.
  PipelinePlan default_plan(std::size_t decode_workers = 3, std::size_t capacity = 4,
                            CopyMode copy = CopyMode::copyless) const;

 private:
  ChainConfig cfg_;
  std::unique_ptr<Source> source_;
  std::unique_ptr<Encoder> encoder_;
  std::unique_ptr<Modulator> modulator_;
  std::unique_ptr<Whitener> scrambler_;
  std::unique_ptr<Channel> channel_;
  std::unique_ptr<Whitener> whitener_;
  std::unique_ptr<Demodulator> demodulator_;
  std::unique_ptr<Switcher> loop_;
  std::unique_ptr<ForLoopControl> loop_ctl_;
  std::unique_ptr<LlrCleanup> cleanup_;
  std::unique_ptr<Decoder> decoder_;
  std::unique_ptr<Monitor> monitor_;
  std::unique_ptr<Sink> sink_;
};

struct ChainResult {
  std::uint64_t frames = 0;
  std::uint64_t frame_errors = 0;
  std::uint64_t bit_errors = 0;
  double fer = 0.0;
  double ber = 0.0;
  double wall_s = 0.0;
  double throughput_mbps = 0.0;  // information bits
  std::uint64_t sink_hash = 0;
  std::optional<PipelineStats> stages;
};

/// Runs cfg.frames frames through `chain`, sequentially when `plan` is empty.
ChainResult run_chain(Chain& chain, const std::optional<PipelinePlan>& plan);

/// Convenience: builds a chain and runs it.
ChainResult run_sequential(const ChainConfig& cfg);
ChainResult run_pipelined(const ChainConfig& cfg, std::size_t decode_workers = 3, std::size_t capacity = 4,
                          CopyMode copy = CopyMode::copyless);

std::string summary_line(const ChainConfig& cfg, const ChainResult& r);

}  // namespace sigflow::demo
