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

#include "dsmc/exact.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "dsmc/error.hpp"
#include "numfmt.hpp"

namespace dsmc {

namespace {

constexpr double kTotalConflictTolerance = 1e-12;

struct StepContext {
  std::size_t step = 0;
  std::size_t steps = 0;
  const CombineLimits* limits = nullptr;
  std::chrono::steady_clock::time_point deadline{};
};

std::string step_name(const StepContext& ctx) {
  return "combine step " + std::to_string(ctx.step) + " (source " + std::to_string(ctx.step) +
         " of " + std::to_string(ctx.steps) + ")";
}

CombinationResult combine_impl(const MassFunction& m1, const MassFunction& m2,
                               const StepContext* ctx) {
  if (!same_frame(m1.frame(), m2.frame())) {
    throw FrameMismatch("cannot combine mass functions over different frames");
  }
  MassBuilder builder(m1.frame());
  builder.reserve(m1.size() * m2.size());
  double conflict = 0.0;
  std::size_t products = 0;
  for (const auto& [a1, w1] : m1.entries()) {
    for (const auto& [a2, w2] : m2.entries()) {
      FocalSet meet = a1 & a2;
      const double w = w1 * w2;
      if (meet.empty()) {
        conflict += w;
      } else {
        builder.add(meet, w);
      }
      if (ctx == nullptr) continue;
      if (builder.size() > ctx->limits->max_focal_sets) {
        throw ResourceLimit(step_name(*ctx) + ": more than " +
                            std::to_string(ctx->limits->max_focal_sets) + " focal sets");
      }
      if (ctx->limits->time_limit && (++products & 0xfff) == 0 &&
          std::chrono::steady_clock::now() > ctx->deadline) {
        throw ResourceLimit(step_name(*ctx) + ": time cap exceeded");
      }
    }
  }
  if (conflict >= 1.0 - kTotalConflictTolerance || builder.size() == 0) {
    throw TotalConflict("combination undefined: the sources are totally conflicting");
  }
  return {std::move(builder).finish(), conflict};
}

// Joint-space enumeration buckets.
struct Buckets {
  double empty = 0.0;
  double inside = 0.0;
  double other = 0.0;

  Buckets& operator+=(const Buckets& o) {
    empty += o.empty;
    inside += o.inside;
    other += o.other;
    return *this;
  }
};

class Enumerator {
 public:
  Enumerator(const EvidenceProblem& p, const FocalSet& b)
      : p_(p), b_(b), words_(b.word_count()),
        scratch_((p.size() + 1) * words_, 0) {}

  // Walks every joint outcome whose first coordinate is in {first, first+stride, ...}.
  Buckets run(std::size_t first, std::size_t stride) {
    Buckets acc;
    auto full = p_.frame()->full_set().words();
    std::copy(full.begin(), full.end(), scratch_.begin());
    const auto& outcomes0 = p_.sources()[0].outcomes();
    for (std::size_t k = first; k < outcomes0.size(); k += stride) {
      descend(0, k, 1.0, acc);
    }
    return acc;
  }

 private:
  void descend(std::size_t depth, std::size_t k, double prob, Buckets& acc) {
    const Outcome& o = p_.sources()[depth].outcomes()[k];
    prob *= o.probability;
    const FocalSet::Word* parent = &scratch_[depth * words_];
    FocalSet::Word* cur = &scratch_[(depth + 1) * words_];
    auto target = o.target.words();
    bool any = false;
    for (std::size_t w = 0; w < words_; ++w) {
      cur[w] = parent[w] & target[w];
      any |= cur[w] != 0;
    }
    if (!any) {
      // Every extension stays empty; the remaining sources sum to 1.
      acc.empty += prob;
      return;
    }
    if (depth + 1 == p_.size()) {
      auto bw = b_.words();
      bool inside = true;
      for (std::size_t w = 0; w < words_ && inside; ++w) inside = (cur[w] & ~bw[w]) == 0;
      (inside ? acc.inside : acc.other) += prob;
      return;
    }
    const auto& next = p_.sources()[depth + 1].outcomes();
    for (std::size_t j = 0; j < next.size(); ++j) descend(depth + 1, j, prob, acc);
  }

  const EvidenceProblem& p_;
  const FocalSet& b_;
  std::size_t words_;
  std::vector<FocalSet::Word> scratch_;
};

Buckets enumerate(const EvidenceProblem& p, const FocalSet& b, const EnumerationLimits& limits) {
  require_valid(p);
  if (b.universe() != p.frame()->size()) {
    throw FrameMismatch("query width does not match the problem frame");
  }
  const std::uint64_t count = joint_outcome_count(p);
  if (count > limits.max_outcomes) {
    throw ResourceLimit("joint outcome space has " +
                        (count == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64")
                                                                            : std::to_string(count)) +
                        " elements; cap is " + std::to_string(limits.max_outcomes));
  }
  const std::size_t outer = p.sources()[0].size();
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(limits.workers, outer));
  if (workers == 1) return Enumerator(p, b).run(0, 1);

  std::vector<Buckets> parts(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] { parts[w] = Enumerator(p, b).run(w, workers); });
    }
  }
  Buckets total;
  for (const auto& part : parts) total += part;
  return total;
}

}  // namespace

CombinationResult combine_pair(const MassFunction& m1, const MassFunction& m2) {
  return combine_impl(m1, m2, nullptr);
}

CombinationResult combine_all(const EvidenceProblem& p, const CombineLimits& limits) {
  require_valid(p);
  StepContext ctx;
  ctx.limits = &limits;
  ctx.steps = p.size() - 1;
  if (limits.time_limit) ctx.deadline = std::chrono::steady_clock::now() + *limits.time_limit;

  MassFunction acc = mass_from_source(p.sources()[0]);
  double survival = 1.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    ctx.step = i;
    CombinationResult step = combine_impl(acc, mass_from_source(p.sources()[i]), &ctx);
    survival *= 1.0 - step.conflict;
    acc = std::move(step.combined);
  }
  return {std::move(acc), 1.0 - survival};
}

ExactBelief exact_belief_enumeration(const EvidenceProblem& p, const FocalSet& b,
                                     const EnumerationLimits& limits) {
  const Buckets buckets = enumerate(p, b, limits);
  const double nonempty = buckets.inside + buckets.other;
  if (nonempty <= kTotalConflictTolerance) {
    throw TotalConflict("belief undefined: every joint outcome has an empty intersection");
  }
  return {std::min(1.0, buckets.inside / nonempty), buckets.empty};
}

double conflict_exact(const EvidenceProblem& p, const EnumerationLimits& limits) {
  require_valid(p);
  return enumerate(p, p.frame()->full_set(), limits).empty;
}

std::uint64_t joint_outcome_count(const EvidenceProblem& p) {
  std::uint64_t count = 1;
  for (const auto& s : p.sources()) {
    const std::uint64_t k = s.size();
    if (k != 0 && count > std::numeric_limits<std::uint64_t>::max() / k) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    count *= k;
  }
  return count;
}

}  // namespace dsmc
