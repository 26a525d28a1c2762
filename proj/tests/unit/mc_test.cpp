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

#include <cmath>
#include <random>
#include <vector>

#include "dsmc/error.hpp"
#include "dsmc/mc.hpp"
#include "dsmc/rng.hpp"
#include "oracle.hpp"

namespace {

using dsmc::FocalSet;
using dsmc::Frame;
using namespace dsmc_test;

RawProblem two_ssf_raw() {
  RawProblem raw;
  raw.n = 2;
  raw.sources = {{{{0.6, 0b01}, {0.4, 0b11}}}, {{{0.5, 0b10}, {0.5, 0b11}}}};
  return raw;
}

dsmc::TrialEngineConfig config(std::uint64_t trials, std::uint64_t seed, unsigned workers = 1) {
  dsmc::TrialEngineConfig cfg;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.workers = workers;
  return cfg;
}

TEST(PlanTrials, SmallestCountMeetingAccuracy) {
  EXPECT_EQ(dsmc::plan_trials(0.05), 900u);
  EXPECT_EQ(dsmc::plan_trials(0.1), 225u);
  EXPECT_EQ(dsmc::plan_trials(1.0), 3u);
  for (double k : {0.013, 0.02, 0.07, 0.3}) {
    const std::uint64_t n = dsmc::plan_trials(k);
    EXPECT_GE(static_cast<double>(n), 9.0 / (4 * k * k) - 1e-9) << k;
    EXPECT_LT(static_cast<double>(n - 1), 9.0 / (4 * k * k)) << k;
  }
  EXPECT_THROW((void)dsmc::plan_trials(0.0), dsmc::InvalidInput);
  EXPECT_THROW((void)dsmc::plan_trials(1.5), dsmc::InvalidInput);
  EXPECT_THROW((void)dsmc::plan_trials(-0.1), dsmc::InvalidInput);
}

TEST(PlanTrials, SdBoundAtOneThousandTrials) {
  EXPECT_LT(dsmc::sd_bound_for(1000), 0.016);
  EXPECT_NEAR(dsmc::sd_bound_for(1000), 0.0158, 1e-4);
  EXPECT_EQ(dsmc::sd_bound_for(1), 0.5);
}

TEST(TrialEngineConfig, RejectsZeroes) {
  auto cfg = config(0, 0);
  EXPECT_THROW(cfg.validate(), dsmc::InvalidInput);
  cfg = config(10, 0, 0);
  EXPECT_THROW(cfg.validate(), dsmc::InvalidInput);
  cfg = config(10, 0);
  cfg.restart_cap = 0;
  EXPECT_THROW(cfg.validate(), dsmc::InvalidInput);
}

TEST(SourceSampler, SingleOutcomeAlwaysZero) {
  const auto f = Frame::make({"x1"});
  const dsmc::SourceSampler s(dsmc::SourceModel(f, {{1.0, f->full_set()}}));
  dsmc::Rng rng(3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(s(rng), 0u);
  EXPECT_EQ(s.index_for(0.999999999), 0u);
}

TEST(SourceSampler, FrequencyMatchesProbability) {
  const auto f = Frame::make({"x1", "x2"});
  const dsmc::SourceSampler s(dsmc::SimpleSupport{f->set_of({"x1"}), 0.6}.to_source(f));
  dsmc::Rng rng(9);
  int zero = 0;
  for (int i = 0; i < 100000; ++i) zero += s(rng) == 0;
  EXPECT_NEAR(zero / 1e5, 0.6, 0.01);
}

TEST(SourceSampler, ManyOutcomesMatchCumulativeTable) {
  const auto f = Frame::make({"x1"});
  std::vector<dsmc::Outcome> outcomes;
  for (int i = 0; i < 12; ++i) outcomes.push_back({(i + 1) / 78.0, f->full_set()});
  const dsmc::SourceSampler s(dsmc::SourceModel(f, outcomes));
  double cum = 0.0;
  for (int i = 0; i < 12; ++i) {
    EXPECT_EQ(s.index_for(cum + 1e-9), static_cast<std::size_t>(i));
    cum += (i + 1) / 78.0;
    EXPECT_EQ(s.index_for(cum - 1e-9), static_cast<std::size_t>(i));
  }
}

TEST(SourceSampler, SameSeedSameSequence) {
  const auto f = Frame::make({"x1", "x2"});
  const dsmc::SourceModel src(f, {{0.2, f->set_of({"x1"})}, {0.3, f->set_of({"x2"})}, {0.5, f->full_set()}});
  const dsmc::SourceSampler s(src);
  dsmc::Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(s(a), s(b));
}

TEST(Rng, StreamsAreDistinctAndReproducible) {
  dsmc::Rng a = dsmc::Rng::stream(5, 0);
  dsmc::Rng b = dsmc::Rng::stream(5, 1);
  dsmc::Rng c = dsmc::Rng::stream(5, 0);
  const auto x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_EQ(x, c.next_u64());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RunTrial, VacuousFullQueryAlwaysSucceeds) {
  const auto f = Frame::make({"x1", "x2"});
  const dsmc::EvidenceProblem p(f, {dsmc::SourceModel(f, {{1.0, f->full_set()}}),
                                    dsmc::SourceModel(f, {{1.0, f->full_set()}})});
  const dsmc::TrialKernel k(p);
  dsmc::Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto r = dsmc::run_trial(k, f->full_set(), rng, 10);
    ASSERT_TRUE(r.success);
    ASSERT_EQ(r.restarts, 0u);
  }
}

TEST(RunTrial, CertainConflictHitsRestartCap) {
  const auto f = Frame::make({"x1", "x2"});
  const dsmc::EvidenceProblem p(f, {dsmc::SourceModel(f, {{1.0, f->set_of({"x1"})}}),
                                    dsmc::SourceModel(f, {{1.0, f->set_of({"x2"})}})});
  const dsmc::TrialKernel k(p);
  dsmc::Rng rng(1);
  EXPECT_THROW((void)dsmc::run_trial(k, f->full_set(), rng, 50), dsmc::ExcessiveConflict);
  try {
    (void)dsmc::estimate(p, {f->full_set()}, config(100, 0));
    FAIL();
  } catch (const dsmc::ExcessiveConflict& e) {
    EXPECT_EQ(e.kappa_hat(), 1.0);
  }
}

TEST(RunTrial, SuccessFrequencyMatchesOracle) {
  const RawProblem raw = two_ssf_raw();
  const dsmc::EvidenceProblem p = to_problem(raw);
  const dsmc::TrialKernel k(p);
  dsmc::Rng rng(77);
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += dsmc::run_trial(k, to_set(2, 0b01), rng, 10000).success;
  EXPECT_NEAR(hits / 1e5, oracle_belief(raw, 0b01).bel, 0.005);
}

TEST(Estimate, CertainAndImpossibleQueries) {
  std::mt19937_64 g(4);
  const RawProblem raw = random_raw_problem(g, 4, 3, 6);
  const dsmc::EvidenceProblem p = to_problem(raw);
  const auto e = dsmc::estimate(p, {p.frame()->full_set(), p.frame()->empty_set()}, config(2000, 1));
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].value, 1.0);
  EXPECT_EQ(e[1].value, 0.0);
  EXPECT_EQ(e[0].restarts, e[1].restarts);
  EXPECT_EQ(e[0].trials, 2000u);
}

TEST(Estimate, ReportsConsistentFields) {
  const dsmc::EvidenceProblem p = to_problem(two_ssf_raw());
  const auto e = dsmc::estimate(p, {to_set(2, 0b01)}, config(1000, 3)).front();
  EXPECT_EQ(e.value, static_cast<double>(e.successes) / 1000.0);
  EXPECT_EQ(e.sd_bound, 1.0 / (2.0 * std::sqrt(1000.0)));
  EXPECT_NEAR(e.plugin_sd, std::sqrt(e.value * (1 - e.value) / 1000.0), 1e-15);
  EXPECT_EQ(e.conflict_estimate, static_cast<double>(e.restarts) / static_cast<double>(e.restarts + 1000));
  EXPECT_EQ(e.lower, std::max(0.0, e.value - 3 * e.sd_bound));
  EXPECT_EQ(e.upper, std::min(1.0, e.value + 3 * e.sd_bound));
}

TEST(Estimate, BatchOfTwoQueriesMatchesOracle) {
  const RawProblem raw = two_ssf_raw();
  const auto e = dsmc::estimate(to_problem(raw), {to_set(2, 0b01), to_set(2, 0b10)}, config(100000, 8));
  EXPECT_NEAR(e[0].value, 3.0 / 7, 3 * e[0].sd_bound);
  EXPECT_NEAR(e[1].value, 2.0 / 7, 3 * e[1].sd_bound);
}

TEST(Estimate, SingleSourceMatchesItsMass) {
  const auto f = Frame::make({"x1", "x2", "x3"});
  const auto a = f->set_of({"x1", "x2"});
  const dsmc::EvidenceProblem p(f, {dsmc::SourceModel(f, {{0.7, a}, {0.3, f->full_set()}})});
  const auto e = dsmc::estimate(p, {a}, config(10000, 2)).front();
  EXPECT_NEAR(e.value, 0.7, 3 * e.sd_bound);
}

TEST(Estimate, RejectsQueriesOverAnotherFrame) {
  const dsmc::EvidenceProblem p = to_problem(two_ssf_raw());
  EXPECT_THROW((void)dsmc::estimate(p, {FocalSet::full(3)}, config(10, 0)), dsmc::FrameMismatch);
  EXPECT_THROW((void)dsmc::estimate(p, {}, config(10, 0)), dsmc::InvalidInput);
}

TEST(Estimate, BatchAgreesWithSingleQueries) {
  std::mt19937_64 g(8);
  for (int round = 0; round < 10; ++round) {
    const RawProblem raw = random_raw_problem(g, 5, 3, 6);
    const dsmc::EvidenceProblem p = to_problem(raw);
    dsmc::QueryBatch batch;
    for (int q = 0; q < 4; ++q) batch.push_back(to_set(raw.n, random_nonempty_mask(g, raw.n)));
    batch.push_back(p.frame()->full_set());
    const auto joint = dsmc::estimate(p, batch, config(5000, round));
    for (std::size_t q = 0; q < batch.size(); ++q) {
      const auto single = dsmc::estimate(p, {batch[q]}, config(5000, round + 100)).front();
      EXPECT_NEAR(joint[q].value, single.value, 2 * 3 * single.sd_bound);
      EXPECT_NEAR(joint[q].value, oracle_belief(raw, to_mask(batch[q])).bel, 3 * single.sd_bound);
    }
    EXPECT_EQ(joint.back().value, 1.0);
  }
}

TEST(Estimate, DeterministicForSeedAndWorkers) {
  std::mt19937_64 g(12);
  const dsmc::EvidenceProblem p = to_problem(random_raw_problem(g, 6, 4, 8, 0.7));
  const dsmc::QueryBatch single{to_set(static_cast<int>(p.frame()->size()), 1)};
  const dsmc::QueryBatch batch{single[0], p.frame()->full_set()};
  for (unsigned w : {1u, 2u, 4u}) {
    for (const auto* b : {&single, &batch}) {
      const auto first = dsmc::estimate(p, *b, config(3001, 99, w));
      for (int rep = 0; rep < 2; ++rep) {
        const auto again = dsmc::estimate(p, *b, config(3001, 99, w));
        for (std::size_t q = 0; q < b->size(); ++q) {
          EXPECT_EQ(first[q].successes, again[q].successes);
          EXPECT_EQ(first[q].restarts, again[q].restarts);
        }
      }
    }
  }
}

TEST(Estimate, WorkersSplitTrialsExactly) {
  const dsmc::EvidenceProblem p = to_problem(two_ssf_raw());
  for (unsigned w : {1u, 3u, 7u}) {
    EXPECT_EQ(dsmc::estimate(p, {to_set(2, 1)}, config(1001, 5, w)).front().trials, 1001u);
  }
}

TEST(Estimate, JointSamplerHookReplacesIndependentDraws) {
  const dsmc::EvidenceProblem p = to_problem(two_ssf_raw());
  // Both sources always pick their focus: Γ = {x1} ∩ {x2} = ∅ forever.
  const dsmc::JointSampler foci = [](dsmc::Rng&, std::span<std::size_t> out) {
    for (auto& i : out) i = 0;
  };
  EXPECT_THROW((void)dsmc::estimate(p, {to_set(2, 1)}, config(10, 0), foci), dsmc::ExcessiveConflict);
  // Only the first source picks its focus: Γ = {x1}.
  const dsmc::JointSampler first = [](dsmc::Rng&, std::span<std::size_t> out) {
    out[0] = 0;
    out[1] = 1;
  };
  const auto e = dsmc::estimate(p, {to_set(2, 0b01)}, config(100, 0), first).front();
  EXPECT_EQ(e.value, 1.0);
  EXPECT_EQ(e.restarts, 0u);
  const dsmc::JointSampler broken = [](dsmc::Rng&, std::span<std::size_t> out) {
    for (auto& i : out) i = 5;
  };
  EXPECT_THROW((void)dsmc::estimate(p, {to_set(2, 1)}, config(10, 0), broken), dsmc::ContractViolation);
}

TEST(ConflictEstimate, Examples) {
  const auto f = Frame::make({"x1", "x2"});
  const dsmc::EvidenceProblem vac(f, {dsmc::SourceModel(f, {{1.0, f->full_set()}})});
  const auto v = dsmc::conflict_estimate(vac, config(1000, 0));
  EXPECT_EQ(v.kappa_hat, 0.0);
  EXPECT_EQ(v.expected_loops, 1.0);

  const auto two = dsmc::conflict_estimate(to_problem(two_ssf_raw()), config(100000, 0));
  EXPECT_NEAR(two.kappa_hat, 0.30, 0.01);

  // {x1} for sure against {x2} half the time: κ = 0.5.
  const dsmc::EvidenceProblem half(f, {dsmc::SourceModel(f, {{1.0, f->set_of({"x1"})}}),
                                       dsmc::SimpleSupport{f->set_of({"x2"}), 0.5}.to_source(f)});
  const auto h = dsmc::conflict_estimate(half, config(100000, 0));
  EXPECT_NEAR(h.expected_loops, 2.0, 0.1);
  EXPECT_NEAR(h.expected_loops, 1.0 / (1.0 - h.kappa_hat), 1e-12);
}

TEST(RestartLawProperty, DrawsPerTrialTrackKnownConflict) {
  std::mt19937_64 g(31);
  for (int round = 0; round < 8; ++round) {
    const RawProblem raw = random_raw_problem(g, 5, 3, 6, 0.8);
    const double kappa = oracle_belief(raw, full_mask(raw.n)).conflict;
    const auto e = dsmc::estimate(to_problem(raw), {to_set(raw.n, 1)}, config(100000, round)).front();
    const double expected = 1.0 / (1.0 - kappa);
    EXPECT_NEAR(e.draws_per_trial(), expected, 0.05 * expected) << "kappa " << kappa;
  }
}

TEST(SsfFastTrial, NoActiveFocusFailsProperQuery) {
  const auto f = Frame::make({"x1", "x2"});
  const dsmc::EvidenceProblem p(f, {dsmc::SimpleSupport{f->set_of({"x1"}), 1e-12}.to_source(f),
                                    dsmc::SimpleSupport{f->set_of({"x2"}), 1e-12}.to_source(f)});
  const dsmc::TrialKernel k(p);
  dsmc::Rng rng(0);
  for (int i = 0; i < 100; ++i) {
    const auto r = dsmc::ssf_fast_trial(k, f->set_of({"x1"}), rng, 10);
    ASSERT_FALSE(r.success);
    ASSERT_EQ(r.restarts, 0u);
    ASSERT_TRUE(dsmc::ssf_fast_trial(k, f->full_set(), rng, 10).success);
  }
}

TEST(SsfFastTrial, RejectsOtherSources) {
  const auto f = Frame::make({"x1", "x2"});
  const dsmc::EvidenceProblem p(f, {dsmc::SourceModel(f, {{0.5, f->set_of({"x1"})}, {0.5, f->set_of({"x2"})}})});
  const dsmc::TrialKernel k(p);
  dsmc::Rng rng(0);
  EXPECT_THROW((void)dsmc::ssf_fast_trial(k, f->full_set(), rng, 10), dsmc::ContractViolation);
  auto cfg = config(10, 0);
  cfg.simple_support_path = true;
  EXPECT_THROW((void)dsmc::estimate(p, {f->full_set()}, cfg), dsmc::ContractViolation);
}

TEST(SsfFastTrial, FrequencyMatchesOracle) {
  auto cfg = config(100000, 4);
  cfg.simple_support_path = true;
  const auto e = dsmc::estimate(to_problem(two_ssf_raw()), {to_set(2, 0b01)}, cfg).front();
  EXPECT_NEAR(e.value, 3.0 / 7, 3 * e.sd_bound);
}

// Same generator state in, same (success, restarts) out, trial by trial.
TEST(SsfFastTrialProperty, ReproducesRunTrialSequence) {
  std::mt19937_64 g(41);
  for (int round = 0; round < 20; ++round) {
    const int n = std::uniform_int_distribution<int>(2, 20)(g);
    const int m = std::uniform_int_distribution<int>(1, 12)(g);
    const RawProblem raw = random_ssf_problem(g, m, n, 0.9);
    const dsmc::EvidenceProblem p = to_problem(raw);
    const dsmc::TrialKernel k(p);
    const FocalSet b = to_set(raw.n, random_nonempty_mask(g, raw.n));
    dsmc::Rng r1(round), r2(round);
    dsmc::TrialScratch s1, s2;
    for (int t = 0; t < 2000; ++t) {
      const auto slow = dsmc::run_trial(k, b, r1, 10000, s1);
      const auto fast = dsmc::ssf_fast_trial(k, b, r2, 10000, s2);
      ASSERT_EQ(slow, fast) << "round " << round << " trial " << t;
    }
    ASSERT_EQ(r1.next_u64(), r2.next_u64());
  }
}

TEST(SubsetScan, Examples) {
  const auto f = Frame::make({"x1", "x2", "x3"});
  const auto a = f->set_of({"x1", "x3"});
  const dsmc::EvidenceProblem det(f, {dsmc::SourceModel(f, {{1.0, a}})});
  const auto d = dsmc::subset_frequency_scan(det, config(500, 0), 5);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].set, a);
  EXPECT_EQ(d[0].frequency, 1.0);

  const dsmc::EvidenceProblem vac(f, {dsmc::SourceModel(f, {{1.0, f->full_set()}})});
  const auto v = dsmc::subset_frequency_scan(vac, config(500, 0), 5);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_TRUE(v[0].set.is_full());

  const auto two = dsmc::subset_frequency_scan(to_problem(two_ssf_raw()), config(100000, 0), 3);
  ASSERT_EQ(two.size(), 3u);
  EXPECT_EQ(two[0].set, to_set(2, 0b01));
  EXPECT_NEAR(two[0].frequency, 3.0 / 7, 0.01);
  double total = 0.0;
  for (const auto& s : two) {
    total += s.frequency;
    if (s.set != to_set(2, 0b01)) {
      EXPECT_NEAR(s.frequency, 2.0 / 7, 0.01);
    }
  }
  EXPECT_LE(total, 1.0 + 1e-12);
}

TEST(SubsetScan, MatchesOracleMassesAndWorkerCount) {
  std::mt19937_64 g(51);
  const RawProblem raw = random_raw_problem(g, 4, 3, 5, 0.6);
  const RawMass expected = oracle_combined(raw);
  const auto one = dsmc::subset_frequency_scan(to_problem(raw), config(40000, 1, 1), 100);
  const auto four = dsmc::subset_frequency_scan(to_problem(raw), config(40000, 1, 4), 100);
  double total = 0.0;
  for (const auto& s : one) {
    total += s.frequency;
    EXPECT_NEAR(s.frequency, expected.at(to_mask(s.set)), 0.015);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  const auto again = dsmc::subset_frequency_scan(to_problem(raw), config(40000, 1, 4), 100);
  ASSERT_EQ(four.size(), again.size());
  for (std::size_t i = 0; i < four.size(); ++i) EXPECT_EQ(four[i].count, again[i].count);
}

TEST(UnbiasednessProperty, WithinThreeSdOnRandomProblems) {
  std::mt19937_64 g(61);
  int misses = 0;
  const int problems = 60;
  for (int round = 0; round < problems; ++round) {
    const RawProblem raw = random_raw_problem(g, 6, 4, 8);
    const Mask b = random_nonempty_mask(g, raw.n);
    const auto e = dsmc::estimate(to_problem(raw), {to_set(raw.n, b)}, config(4000, round)).front();
    misses += std::abs(e.value - oracle_belief(raw, b).bel) > 3 * e.sd_bound;
  }
  EXPECT_LE(misses, 2);
}

// Pooled over 400 seeds so the sample variance itself is tight.
TEST(VarianceProperty, SampleVarianceBelowQuarterN) {
  const RawProblem raw = two_ssf_raw();
  const dsmc::EvidenceProblem p = to_problem(raw);
  std::vector<double> values;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    values.push_back(dsmc::estimate(p, {to_set(2, 0b01)}, config(1000, seed)).front().value);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= values.size() - 1;
  EXPECT_LE(var, 1.2 / 4000.0);
}

}  // namespace
