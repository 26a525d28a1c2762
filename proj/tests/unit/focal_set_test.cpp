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

#include <gtest/gtest.h>

#include <bitset>
#include <random>
#include <unordered_set>
#include <vector>

#include "dsmc/error.hpp"
#include "dsmc/focal_set.hpp"

namespace {

using dsmc::FocalSet;

TEST(FocalSet, StartsEmptyAndTracksMembership) {
  FocalSet s(5);
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.universe(), 5u);
  s.insert(0);
  s.insert(4);
  EXPECT_TRUE(s.contains(0));
  EXPECT_TRUE(s.contains(4));
  EXPECT_FALSE(s.contains(2));
  EXPECT_EQ(s.count(), 2u);
  EXPECT_EQ(s.indices(), (std::vector<std::size_t>{0, 4}));
  s.erase(0);
  EXPECT_EQ(s.indices(), (std::vector<std::size_t>{4}));
}

TEST(FocalSet, InsertOutsideUniverseThrows) {
  FocalSet s(3);
  EXPECT_THROW(s.insert(3), dsmc::InvalidInput);
  EXPECT_THROW((void)FocalSet::of(3, {0, 7}), dsmc::InvalidInput);
}

TEST(FocalSet, FullKeepsTailBitsClear) {
  for (std::size_t n : {1u, 63u, 64u, 65u, 127u, 128u, 1024u, 1030u}) {
    const FocalSet f = FocalSet::full(n);
    EXPECT_TRUE(f.is_full());
    EXPECT_EQ(f.count(), n);
    EXPECT_EQ(f.word_count(), FocalSet::words_for(n));
    if (n % 64 != 0) {
      EXPECT_EQ(f.words().back() >> (n % 64), 0u) << n;
    }
    EXPECT_TRUE(f.complement().empty());
    EXPECT_EQ(FocalSet(n).complement(), f);
  }
}

TEST(FocalSet, IntersectExamples) {
  const FocalSet a = FocalSet::of(3, {0, 1});
  const FocalSet b = FocalSet::of(3, {1, 2});
  const std::vector<FocalSet> ab{a, b};
  EXPECT_EQ(dsmc::focal_intersect(ab), FocalSet::of(3, {1}));
  const std::vector<FocalSet> disjoint{FocalSet::of(3, {0}), FocalSet::of(3, {1})};
  EXPECT_TRUE(dsmc::focal_intersect(disjoint).empty());
  const std::vector<FocalSet> single{a};
  EXPECT_EQ(dsmc::focal_intersect(single), a);
}

TEST(FocalSet, IntersectRejectsEmptyListAndMixedUniverses) {
  EXPECT_THROW((void)dsmc::focal_intersect({}), dsmc::InvalidInput);
  const std::vector<FocalSet> mixed{FocalSet::full(3), FocalSet::full(4)};
  EXPECT_THROW((void)dsmc::focal_intersect(mixed), dsmc::FrameMismatch);
  EXPECT_THROW((void)FocalSet::full(3).is_subset_of(FocalSet::full(4)), dsmc::FrameMismatch);
}

TEST(FocalSet, EqualSetsHashEqual) {
  const FocalSet a = FocalSet::of(130, {1, 64, 129});
  FocalSet b(130);
  for (std::size_t j : {129u, 64u, 1u}) b.insert(j);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.hash(), b.hash());
  std::unordered_set<FocalSet> seen{a};
  EXPECT_TRUE(seen.count(b));
  EXPECT_NE(a, FocalSet::of(131, {1, 64, 129}));
}

TEST(FocalSet, OrderIsTotalAndConsistentWithEquality) {
  std::mt19937_64 g(11);
  std::vector<FocalSet> sets;
  for (int i = 0; i < 60; ++i) {
    FocalSet s(70);
    for (std::size_t j = 0; j < 70; ++j) {
      if (g() % 4 == 0) s.insert(j);
    }
    sets.push_back(s);
  }
  for (const auto& a : sets) {
    for (const auto& b : sets) {
      EXPECT_EQ((a <=> b) == 0, a == b);
      EXPECT_EQ(a <=> b, 0 <=> (b <=> a));
    }
  }
}

// Bit operations agree with std::bitset on random sets spanning three words.
TEST(FocalSetProperty, MatchesBitsetModel) {
  constexpr std::size_t kN = 150;
  std::mt19937_64 g(3);
  auto random_pair = [&] {
    std::bitset<kN> bits;
    FocalSet s(kN);
    const unsigned density = 1 + g() % 7;
    for (std::size_t j = 0; j < kN; ++j) {
      if (g() % 8 < density) {
        bits.set(j);
        s.insert(j);
      }
    }
    return std::pair{bits, s};
  };
  for (int round = 0; round < 500; ++round) {
    auto [ba, a] = random_pair();
    auto [bb, b] = random_pair();
    const auto model_and = ba & bb;
    const auto model_or = ba | bb;
    EXPECT_EQ((a & b).count(), model_and.count());
    EXPECT_EQ((a | b).count(), model_or.count());
    EXPECT_EQ(a.complement().count(), (~ba).count());
    EXPECT_EQ(a.intersects(b), model_and.any());
    EXPECT_EQ(a.is_subset_of(b), (ba & ~bb).none());
    EXPECT_EQ((a & b).is_subset_of(a), true);
    for (std::size_t j = 0; j < kN; ++j) ASSERT_EQ((a & b).contains(j), model_and.test(j));
  }
}

}  // namespace
