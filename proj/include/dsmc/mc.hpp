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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dsmc/evidence.hpp"
#include "dsmc/rng.hpp"

namespace dsmc {

inline constexpr std::uint64_t kDefaultRestartCap = 10'000;

struct TrialEngineConfig {
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  /// Maximum rejected draws allowed within a single trial.
  std::uint64_t restart_cap = kDefaultRestartCap;
  unsigned workers = 1;
  /// Run singleton queries through the simple-support kernel. Every source
  /// must then have simple-support shape.
  bool simple_support_path = false;

  /// Throws InvalidInput on a zero trial count, restart cap or worker count.
  void validate() const;
};

/// Monte-Carlo estimate of one belief value.
struct Estimate {
  double value = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  /// Rejected draws (empty intersections) over the whole run.
  std::uint64_t restarts = 0;
  /// Conservative standard deviation 1/(2 sqrt(N)).
  double sd_bound = 0.0;
  /// Plug-in standard deviation sqrt(value (1 - value) / N).
  double plugin_sd = 0.0;
  /// restarts / (restarts + N).
  double conflict_estimate = 0.0;
  /// value -/+ 3 sd_bound, clipped to [0, 1].
  double lower = 0.0;
  double upper = 0.0;

  double draws_per_trial() const {
    return trials == 0 ? 0.0 : static_cast<double>(restarts + trials) / static_cast<double>(trials);
  }
};

/// Queries sharing one trial stream. Non-empty, all over the problem frame.
using QueryBatch = std::vector<FocalSet>;

/// Smallest N with N >= 9 / (4 k^2): three conservative standard deviations
/// of the estimate are then at most k. Throws InvalidInput unless 0 < k <= 1.
std::uint64_t plan_trials(double accuracy);

/// 1 / (2 sqrt(N)).
double sd_bound_for(std::uint64_t trials);

/// Cumulative table for drawing one outcome index of a source.
class SourceSampler {
 public:
  explicit SourceSampler(const SourceModel& source);

  /// Index i such that u falls in outcome i's slice of [0, 1).
  std::size_t index_for(double u) const;
  std::size_t operator()(Rng& rng) const { return index_for(rng.uniform()); }
  std::size_t size() const noexcept { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

/// Draws one outcome index per source; an alternative to independent
/// sampling of each source. Indices must be in range for their source.
using JointSampler = std::function<void(Rng&, std::span<std::size_t>)>;

/// A validated problem flattened for repeated trials: one sampler per source
/// and every outcome target laid out as contiguous words.
class TrialKernel {
 public:
  explicit TrialKernel(const EvidenceProblem& p, JointSampler joint = {});

  std::size_t source_count() const noexcept { return samplers_.size(); }
  std::size_t universe() const noexcept { return universe_; }
  std::size_t word_count() const noexcept { return words_; }

  /// One draw of every source, in source order. Exactly one uniform per
  /// source unless a joint sampler was installed.
  void draw(Rng& rng, std::span<std::size_t> choice) const;

  std::span<const FocalSet::Word> target(std::size_t source, std::size_t outcome) const {
    return {&targets_[(offsets_[source] + outcome) * words_], words_};
  }

  bool simple_support() const noexcept { return simple_support_; }
  bool has_joint_sampler() const noexcept { return static_cast<bool>(joint_); }
  std::size_t focus_index(std::size_t source) const { return focus_[source]; }
  const SourceSampler& sampler(std::size_t source) const { return samplers_[source]; }

 private:
  std::size_t universe_;
  std::size_t words_;
  std::vector<SourceSampler> samplers_;
  std::vector<std::size_t> offsets_;
  std::vector<FocalSet::Word> targets_;
  std::vector<std::size_t> focus_;
  bool simple_support_ = true;
  JointSampler joint_;
};

struct TrialResult {
  bool success = false;
  /// Rejected draws before the accepted one.
  std::uint64_t restarts = 0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

/// Reusable buffers for the trial functions.
struct TrialScratch {
  std::vector<std::size_t> choice;
  std::vector<const FocalSet::Word*> rows;
  std::vector<FocalSet::Word> gamma;

  void fit(const TrialKernel& k);
};

/// One trial of the combined emptiness/subset test.
///
/// Draws every source, then ANDs the chosen targets one word at a time. The
/// first word with an intersection bit outside `b` fails the trial at once. A
/// draw whose intersection turns out empty is rejected and redrawn; more than
/// `restart_cap` rejections throw ExcessiveConflict.
TrialResult run_trial(const TrialKernel& k, const FocalSet& b, Rng& rng, std::uint64_t restart_cap,
                      TrialScratch& scratch);
TrialResult run_trial(const TrialKernel& k, const FocalSet& b, Rng& rng, std::uint64_t restart_cap);

/// Same contract as run_trial for problems made only of simple-support
/// sources. Each source consumes one uniform that decides whether its focus
/// is active; the intersection is the AND of the active foci only (the whole
/// frame when none is active). Produces the same (success, restarts) sequence
/// as run_trial from the same generator state. Throws ContractViolation for
/// other problems.
TrialResult ssf_fast_trial(const TrialKernel& k, const FocalSet& b, Rng& rng,
                           std::uint64_t restart_cap, TrialScratch& scratch);
TrialResult ssf_fast_trial(const TrialKernel& k, const FocalSet& b, Rng& rng,
                           std::uint64_t restart_cap);

/// Estimates Bel(b) for every query in the batch from one stream of N
/// accepted trials. Results are bit-identical for a fixed (seed, workers).
std::vector<Estimate> estimate(const EvidenceProblem& p, const QueryBatch& batch,
                               const TrialEngineConfig& cfg, const JointSampler& joint = {});

struct ConflictEstimate {
  double kappa_hat = 0.0;
  /// 1 / (1 - kappa_hat): mean draws per accepted trial.
  double expected_loops = 1.0;
  std::uint64_t trials = 0;
  std::uint64_t restarts = 0;
};

ConflictEstimate conflict_estimate(const EvidenceProblem& p, const TrialEngineConfig& cfg);

struct SubsetFrequency {
  FocalSet set;
  std::uint64_t count = 0;
  double frequency = 0.0;
};

/// Tallies the realized joint intersections over N accepted trials and
/// returns the `max_report` most frequent, heaviest first (ties by set order).
std::vector<SubsetFrequency> subset_frequency_scan(const EvidenceProblem& p,
                                                   const TrialEngineConfig& cfg,
                                                   std::size_t max_report);

}  // namespace dsmc
