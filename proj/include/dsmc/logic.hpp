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
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dsmc/evidence.hpp"
#include "dsmc/mc.hpp"

namespace dsmc {

/// A propositional atom (by index into the problem's atom list) with a sign.
struct Literal {
  std::uint32_t atom = 0;
  bool positive = true;

  Literal complement() const { return {atom, !positive}; }

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// A conjunction of literals. May hold complementary pairs; consistency is
/// checked with is_contradictory, not enforced.
class TermSet {
 public:
  TermSet() = default;
  TermSet(std::initializer_list<Literal> literals);
  explicit TermSet(std::vector<Literal> literals);

  const std::vector<Literal>& literals() const noexcept { return literals_; }
  std::size_t size() const noexcept { return literals_.size(); }
  bool empty() const noexcept { return literals_.empty(); }
  bool contains(Literal l) const;

  friend bool operator==(const TermSet&, const TermSet&) = default;

 private:
  std::vector<Literal> literals_;  // sorted, unique
};

/// A disjunction of literals; non-empty.
struct ClauseQuery {
  std::vector<Literal> literals;
};

struct LogicOutcome {
  double probability = 0.0;
  TermSet terms;

  friend bool operator==(const LogicOutcome&, const LogicOutcome&) = default;
};

struct LogicSource {
  std::vector<LogicOutcome> outcomes;

  friend bool operator==(const LogicSource&, const LogicSource&) = default;
};

/// Sources over a named set of atoms.
class LogicProblem {
 public:
  LogicProblem(std::vector<std::string> atoms, std::vector<LogicSource> sources);

  const std::vector<std::string>& atoms() const noexcept { return atoms_; }
  const std::vector<LogicSource>& sources() const noexcept { return sources_; }
  std::optional<std::uint32_t> atom_index(std::string_view name) const;

  friend bool operator==(const LogicProblem& a, const LogicProblem& b) {
    return a.atoms_ == b.atoms_ && a.sources_ == b.sources_;
  }

 private:
  std::vector<std::string> atoms_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<LogicSource> sources_;
};

/// Broken invariants of a logic problem; empty means valid.
std::vector<std::string> validate_logic_problem(const LogicProblem& p);

/// True iff some atom occurs with both signs.
bool is_contradictory(const TermSet& t);

/// True iff the clause holds a complementary pair.
bool is_tautology(const ClauseQuery& c);

/// Whether the conjunction `t` entails the clause `c`: `c` is a tautology or
/// shares a literal with `t`. Throws ContractViolation if `t` is contradictory.
bool entails(const TermSet& t, const ClauseQuery& c);

inline constexpr std::uint64_t kUnlimitedBudget = std::numeric_limits<std::uint64_t>::max();

/// Result of a budgeted estimate. Trials that run out of budget count as
/// failures in `lower` and as successes in `upper`.
struct BoundedEstimate {
  double lower = 0.0;
  double upper = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t restarts = 0;
  double sd_bound = 0.0;
  double conflict_estimate = 0.0;
};

/// Monte-Carlo belief of clause `c` given the logic sources.
///
/// Each trial draws one outcome per source and conjoins their literals,
/// redrawing on contradiction, then tests entailment. `step_budget` bounds
/// the literal-membership checks a trial may spend, across its redraws.
/// Trial t uses generator stream (seed, t), so outcomes do not depend on the
/// worker count and a larger budget never turns a completed trial into a
/// timeout.
BoundedEstimate logic_estimate(const LogicProblem& p, const ClauseQuery& c,
                               const TrialEngineConfig& cfg,
                               std::uint64_t step_budget = kUnlimitedBudget);

inline constexpr std::size_t kMaxTranslateAtoms = 16;

/// Set-based equivalent of a logic problem: the frame is the 2^k truth
/// assignments (assignment a makes atom i true iff bit i of a is set) and
/// each outcome's literals map to the assignments satisfying them.
/// Throws ResourceLimit for more than 16 atoms.
EvidenceProblem translate_to_set_problem(const LogicProblem& p);

/// Assignments satisfying a conjunction / a clause, over a translated frame.
FocalSet satisfying_set(std::size_t atom_count, const TermSet& t);
FocalSet satisfying_set(std::size_t atom_count, const ClauseQuery& c);

}  // namespace dsmc
