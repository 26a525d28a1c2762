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

#include "dsmc/focal_set.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "dsmc/error.hpp"

namespace dsmc {

FocalSet::FocalSet(std::size_t universe)
    : universe_(universe), words_(words_for(universe), Word{0}) {}

FocalSet FocalSet::full(std::size_t universe) {
  FocalSet s(universe);
  std::fill(s.words_.begin(), s.words_.end(), ~Word{0});
  s.mask_tail();
  return s;
}

FocalSet FocalSet::of(std::size_t universe, std::initializer_list<std::size_t> indices) {
  return of(universe, std::span<const std::size_t>(indices.begin(), indices.size()));
}

FocalSet FocalSet::of(std::size_t universe, std::span<const std::size_t> indices) {
  FocalSet s(universe);
  for (std::size_t j : indices) s.insert(j);
  return s;
}

bool FocalSet::contains(std::size_t j) const {
  if (j >= universe_) return false;
  return (words_[j / kWordBits] >> (j % kWordBits)) & 1u;
}

void FocalSet::insert(std::size_t j) {
  if (j >= universe_) {
    throw InvalidInput("element index " + std::to_string(j) + " outside frame of size " +
                       std::to_string(universe_));
  }
  words_[j / kWordBits] |= Word{1} << (j % kWordBits);
}

void FocalSet::erase(std::size_t j) {
  if (j >= universe_) return;
  words_[j / kWordBits] &= ~(Word{1} << (j % kWordBits));
}

bool FocalSet::empty() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
}

bool FocalSet::is_full() const noexcept { return *this == full(universe_); }

std::size_t FocalSet::count() const noexcept {
  std::size_t c = 0;
  for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::size_t> FocalSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for (std::size_t w = 0; w < words_.size(); ++w) {
    Word bits = words_[w];
    while (bits != 0) {
      out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

bool FocalSet::is_subset_of(const FocalSet& other) const {
  check_same_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w] & ~other.words_[w]) return false;
  }
  return true;
}

bool FocalSet::intersects(const FocalSet& other) const {
  check_same_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w] & other.words_[w]) return true;
  }
  return false;
}

FocalSet& FocalSet::operator&=(const FocalSet& other) {
  check_same_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  return *this;
}

FocalSet& FocalSet::operator|=(const FocalSet& other) {
  check_same_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  return *this;
}

FocalSet FocalSet::complement() const {
  FocalSet out(*this);
  for (Word& w : out.words_) w = ~w;
  out.mask_tail();
  return out;
}

void FocalSet::assign_words(std::span<const Word> words) {
  if (words.size() != words_.size()) {
    throw FrameMismatch("word span of width " + std::to_string(words.size()) +
                        " does not match set width " + std::to_string(words_.size()));
  }
  std::copy(words.begin(), words.end(), words_.begin());
  mask_tail();
}

std::strong_ordering operator<=>(const FocalSet& a, const FocalSet& b) noexcept {
  if (auto c = a.universe_ <=> b.universe_; c != 0) return c;
  for (std::size_t w = a.words_.size(); w-- > 0;) {
    if (auto c = a.words_[w] <=> b.words_[w]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::size_t FocalSet::hash() const noexcept {
  // FNV-1a over the words, finished with a 64-bit mix.
  std::uint64_t h = 0xcbf29ce484222325ull ^ universe_;
  for (Word w : words_) {
    h ^= w;
    h *= 0x100000001b3ull;
    h ^= h >> 29;
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return static_cast<std::size_t>(h);
}

void FocalSet::check_same_universe(const FocalSet& other) const {
  if (universe_ != other.universe_) {
    throw FrameMismatch("sets over frames of size " + std::to_string(universe_) + " and " +
                        std::to_string(other.universe_));
  }
}

void FocalSet::mask_tail() noexcept {
  if (words_.empty()) return;
  const std::size_t tail = universe_ % kWordBits;
  if (tail != 0) words_.back() &= (Word{1} << tail) - 1;
}

FocalSet focal_intersect(std::span<const FocalSet> sets) {
  if (sets.empty()) throw InvalidInput("focal_intersect needs at least one set");
  FocalSet out = sets.front();
  for (std::size_t i = 1; i < sets.size(); ++i) out &= sets[i];
  return out;
}

}  // namespace dsmc
