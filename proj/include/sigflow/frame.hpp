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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sigflow {

enum class ElemKind : std::uint8_t { u8, i32, f32, c32 };

std::size_t elem_size(ElemKind kind) noexcept;
std::string_view to_string(ElemKind kind) noexcept;
bool parse_elem_kind(std::string_view text, ElemKind& out) noexcept;

template <class T>
struct elem_kind_of;
template <>
struct elem_kind_of<std::uint8_t> {
  static constexpr ElemKind value = ElemKind::u8;
};
template <>
struct elem_kind_of<std::int32_t> {
  static constexpr ElemKind value = ElemKind::i32;
};
template <>
struct elem_kind_of<float> {
  static constexpr ElemKind value = ElemKind::f32;
};
template <>
struct elem_kind_of<std::complex<float>> {
  static constexpr ElemKind value = ElemKind::c32;
};

/// Fixed-size frame storage. The payload length never changes after
/// construction; `generation` is the index of the frame currently held.
class FrameBuffer {
 public:
  FrameBuffer(ElemKind kind, std::size_t count);

  ElemKind kind() const noexcept { return kind_; }
  std::size_t count() const noexcept { return count_; }
  std::size_t size_bytes() const noexcept { return payload_.size(); }

  std::uint64_t generation() const noexcept { return generation_; }
  void set_generation(std::uint64_t g) noexcept { generation_ = g; }

  std::span<std::byte> bytes() noexcept { return payload_; }
  std::span<const std::byte> bytes() const noexcept { return payload_; }

  /// Typed view. Throws type_mismatch when T does not match kind().
  template <class T>
  std::span<T> as() {
    check_kind(elem_kind_of<T>::value);
    return {reinterpret_cast<T*>(payload_.data()), count_};
  }
  template <class T>
  std::span<const T> as() const {
    check_kind(elem_kind_of<T>::value);
    return {reinterpret_cast<const T*>(payload_.data()), count_};
  }

  /// Copies payload and generation from `other` (same shape required).
  void copy_from(const FrameBuffer& other);

 private:
  void check_kind(ElemKind wanted) const;

  ElemKind kind_;
  std::size_t count_;
  std::uint64_t generation_ = 0;
  std::vector<std::byte> payload_;
};

/// FNV-1a over the payload bytes; used for copy-less and isolation audits.
std::uint64_t checksum(std::span<const std::byte> bytes) noexcept;

}  // namespace sigflow
