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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "dsmc/evidence.hpp"

namespace dsmc {

/// Result of Dempster's rule: the normalized combination and the conflict,
/// i.e. the mass that fell on the empty set before renormalization.
struct CombinationResult {
  MassFunction combined;
  double conflict = 0.0;
};

/// Limits for the mass-space combiner.
struct CombineLimits {
  /// Maximum number of focal sets held after any combination step.
  std::size_t max_focal_sets = std::size_t{1} << 20;
  /// Optional wall-clock budget for the whole fold.
  std::optional<std::chrono::steady_clock::duration> time_limit;
};

/// Limits for exhaustive enumeration of the joint outcome space.
struct EnumerationLimits {
  std::uint64_t max_outcomes = 10'000'000;
  unsigned workers = 1;
};

/// Orthogonal sum of two mass functions. Throws TotalConflict when the
/// conflict is 1 within 1e-12 and FrameMismatch for different frames.
CombinationResult combine_pair(const MassFunction& m1, const MassFunction& m2);

/// Left fold of combine_pair over every source, in source order. The reported
/// conflict is the probability that the joint intersection is empty,
/// 1 - prod(1 - conflict_step). Throws ResourceLimit naming the step when a
/// limit is exceeded.
CombinationResult combine_all(const EvidenceProblem& p, const CombineLimits& limits = {});

struct ExactBelief {
  double bel = 0.0;
  double conflict = 0.0;
};

/// Bel(b) by enumerating every joint outcome and its product probability.
/// Throws ResourceLimit when the joint space exceeds the cap and
/// TotalConflict when every joint outcome is empty.
ExactBelief exact_belief_enumeration(const EvidenceProblem& p, const FocalSet& b,
                                     const EnumerationLimits& limits = {});

/// Probability that the joint intersection is empty, by enumeration.
double conflict_exact(const EvidenceProblem& p, const EnumerationLimits& limits = {});

/// Product of the sources' outcome counts, saturating at UINT64_MAX.
std::uint64_t joint_outcome_count(const EvidenceProblem& p);

}  // namespace dsmc
