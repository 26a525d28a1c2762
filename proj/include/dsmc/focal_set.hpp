// Copyright 2026 The dsmc Authors
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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace dsmc {

/// A subset of a frame, stored as a fixed-width bitmask over element indices.
///
/// Bit j is set iff the j-th frame element belongs to the subset. The width
/// (the universe size) is fixed at construction and bits at or above it are
/// always clear. Binary operations require equal universes and throw
/// FrameMismatch otherwise.
class FocalSet {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  FocalSet() = default;

  /// The empty subset of a universe with `universe` elements.
  explicit FocalSet(std::size_t universe);

  static FocalSet full(std::size_t universe);
  static FocalSet of(std::size_t universe,
                     std::initializer_list<std::size_t> indices);
  static FocalSet of(std::size_t universe, std::span<const std::size_t> indices);

  static constexpr std::size_t words_for(std::size_t universe) {
    return (universe + kWordBits - 1) / kWordBits;
  }

  std::size_t universe() const noexcept { return universe_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  std::span<const Word> words() const noexcept { return {words_.data(), words_.size()}; }

  bool contains(std::size_t j) const;
  void insert(std::size_t j);
  void erase(std::size_t j);

  bool empty() const noexcept;
  bool is_full() const noexcept;
  std::size_t count() const noexcept;
  std::vector<std::size_t> indices() const;

  bool is_subset_of(const FocalSet& other) const;
  bool intersects(const FocalSet& other) const;

  FocalSet& operator&=(const FocalSet& other);
  FocalSet& operator|=(const FocalSet& other);
  FocalSet complement() const;

  /// Overwrites the bits from a raw word span of the same width. Bits beyond
  /// the universe are masked off.
  void assign_words(std::span<const Word> words);

  friend FocalSet operator&(FocalSet a, const FocalSet& b) { return a &= b; }
  friend FocalSet operator|(FocalSet a, const FocalSet& b) { return a |= b; }

  friend bool operator==(const FocalSet& a, const FocalSet& b) noexcept {
    return a.universe_ == b.universe_ && a.words_ == b.words_;
  }
  /// Total order: by universe, then by the bitmask read as a big integer.
  friend std::strong_ordering operator<=>(const FocalSet& a, const FocalSet& b) noexcept;

  std::size_t hash() const noexcept;

 private:
  void check_same_universe(const FocalSet& other) const;
  void mask_tail() noexcept;

  std::size_t universe_ = 0;
  boost::container::small_vector<Word, 1> words_;
};

/// Intersection of a non-empty list of sets over one universe.
FocalSet focal_intersect(std::span<const FocalSet> sets);

}  // namespace dsmc

template <>
struct std::hash<dsmc::FocalSet> {
  std::size_t operator()(const dsmc::FocalSet& s) const noexcept { return s.hash(); }
};
