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

#include "sigflow/frame.hpp"

#include <cstring>
#include <string>

#include "sigflow/error.hpp"

namespace sigflow {

std::size_t elem_size(ElemKind kind) noexcept {
  switch (kind) {
    case ElemKind::u8:
      return 1;
    case ElemKind::i32:
    case ElemKind::f32:
      return 4;
    case ElemKind::c32:
      return 8;
  }
  return 0;
}

std::string_view to_string(ElemKind kind) noexcept {
  switch (kind) {
    case ElemKind::u8:
      return "u8";
    case ElemKind::i32:
      return "i32";
    case ElemKind::f32:
      return "f32";
    case ElemKind::c32:
      return "c32";
  }
  return "?";
}

bool parse_elem_kind(std::string_view text, ElemKind& out) noexcept {
  for (auto k : {ElemKind::u8, ElemKind::i32, ElemKind::f32, ElemKind::c32}) {
    if (to_string(k) == text) {
      out = k;
      return true;
    }
  }
  return false;
}

FrameBuffer::FrameBuffer(ElemKind kind, std::size_t count)
    : kind_(kind), count_(count), payload_(elem_size(kind) * count) {
  if (count == 0) throw Error(Errc::invalid_argument, "frame element count must be positive");
}

void FrameBuffer::copy_from(const FrameBuffer& other) {
  if (other.kind_ != kind_ || other.count_ != count_)
    throw Error(Errc::type_mismatch, "frame copy between different shapes");
  std::memcpy(payload_.data(), other.payload_.data(), payload_.size());
  generation_ = other.generation_;
}

void FrameBuffer::check_kind(ElemKind wanted) const {
  if (wanted != kind_)
    throw Error(Errc::type_mismatch, "frame holds " + std::string(to_string(kind_)) + ", accessed as " +
                                         std::string(to_string(wanted)));
}

std::uint64_t checksum(std::span<const std::byte> bytes) noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (auto b : bytes) {
    h ^= static_cast<std::uint8_t>(b);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace sigflow
