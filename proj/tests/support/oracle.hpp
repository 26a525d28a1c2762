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

// Reference implementations used as test oracles. They work on plain 32-bit
// masks and share no code with the library beyond the conversion helpers.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dsmc/evidence.hpp"
#include "dsmc/logic.hpp"

namespace dsmc_test {

using Mask = std::uint32_t;

inline Mask full_mask(int n) { return n >= 32 ? ~Mask{0} : (Mask{1} << n) - 1; }

struct RawSource {
  std::vector<std::pair<double, Mask>> outcomes;
};

struct RawProblem {
  int n = 0;
  std::vector<RawSource> sources;
};

// Visits every joint outcome with its product probability and intersection.
inline void for_each_joint(const RawProblem& p, const std::function<void(double, Mask)>& visit) {
  std::function<void(std::size_t, double, Mask)> rec = [&](std::size_t i, double prob, Mask acc) {
    if (i == p.sources.size()) {
      visit(prob, acc);
      return;
    }
    for (const auto& [q, target] : p.sources[i].outcomes) rec(i + 1, prob * q, acc & target);
  };
  rec(0, 1.0, full_mask(p.n));
}

struct OracleBelief {
  double bel = 0.0;
  double conflict = 0.0;
};

inline OracleBelief oracle_belief(const RawProblem& p, Mask b) {
  double empty = 0.0;
  double inside = 0.0;
  for_each_joint(p, [&](double prob, Mask g) {
    if (g == 0) empty += prob;
    else if ((g & ~b) == 0) inside += prob;
  });
  return {inside / (1.0 - empty), empty};
}

// Distribution of the non-empty joint intersection, i.e. the combined masses.
inline std::map<Mask, double> oracle_combined(const RawProblem& p, double* conflict = nullptr) {
  std::map<Mask, double> mass;
  double empty = 0.0;
  for_each_joint(p, [&](double prob, Mask g) {
    if (g == 0) empty += prob;
    else mass[g] += prob;
  });
  for (auto& [set, v] : mass) v /= 1.0 - empty;
  if (conflict != nullptr) *conflict = empty;
  return mass;
}

inline std::vector<double> random_probabilities(std::mt19937_64& g, std::size_t k) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) total += x = u(g);
  for (auto& x : w) x /= total;
  return w;
}

inline Mask random_nonempty_mask(std::mt19937_64& g, int n) {
  std::uniform_int_distribution<Mask> u(1, full_mask(n));
  return u(g);
}

// Random problem with at most the given sizes and conflict below max_conflict.
inline RawProblem random_raw_problem(std::mt19937_64& g, int max_sources, int max_outcomes, int max_n,
                                     double max_conflict = 0.95) {
  for (;;) {
    RawProblem p;
    p.n = std::uniform_int_distribution<int>(1, max_n)(g);
    const int m = std::uniform_int_distribution<int>(1, max_sources)(g);
    for (int i = 0; i < m; ++i) {
      const auto k = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, max_outcomes)(g));
      RawSource s;
      for (double q : random_probabilities(g, k)) s.outcomes.emplace_back(q, random_nonempty_mask(g, p.n));
      p.sources.push_back(std::move(s));
    }
    if (oracle_belief(p, full_mask(p.n)).conflict <= max_conflict) return p;
  }
}

// Problem whose sources are all simple support functions.
inline RawProblem random_ssf_problem(std::mt19937_64& g, int m, int n, double max_conflict = 0.95) {
  for (;;) {
    RawProblem p;
    p.n = n;
    std::uniform_real_distribution<double> w(0.1, 0.9);
    for (int i = 0; i < m; ++i) {
      Mask focus = random_nonempty_mask(g, n);
      if (focus == full_mask(n) && n > 1) focus &= ~Mask{1};
      const double s = w(g);
      p.sources.push_back({{{s, focus}, {1.0 - s, full_mask(n)}}});
    }
    if (oracle_belief(p, full_mask(n)).conflict <= max_conflict) return p;
  }
}

inline std::vector<std::string> labels(int n, const char* prefix = "e") {
  std::vector<std::string> out;
  for (int j = 0; j < n; ++j) out.push_back(prefix + std::to_string(j));
  return out;
}

inline dsmc::FocalSet to_set(int n, Mask m) {
  dsmc::FocalSet s(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    if ((m >> j) & 1u) s.insert(static_cast<std::size_t>(j));
  }
  return s;
}

inline Mask to_mask(const dsmc::FocalSet& s) {
  Mask m = 0;
  for (std::size_t j : s.indices()) m |= Mask{1} << j;
  return m;
}

inline dsmc::EvidenceProblem to_problem(const RawProblem& p) {
  const dsmc::FramePtr frame = dsmc::Frame::make(labels(p.n));
  std::vector<dsmc::SourceModel> sources;
  for (const auto& s : p.sources) {
    std::vector<dsmc::Outcome> outcomes;
    for (const auto& [q, target] : s.outcomes) outcomes.push_back({q, to_set(p.n, target)});
    sources.emplace_back(frame, std::move(outcomes));
  }
  return dsmc::EvidenceProblem(frame, std::move(sources));
}

// ---- mass functions as plain maps ----------------------------------------

using RawMass = std::map<Mask, double>;

inline RawMass random_mass(std::mt19937_64& g, int n, int max_focal) {
  const auto k = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, max_focal)(g));
  RawMass m;
  for (double q : random_probabilities(g, k)) m[random_nonempty_mask(g, n)] += q;
  return m;
}

inline dsmc::MassFunction to_mass(const dsmc::FramePtr& frame, const RawMass& m) {
  std::vector<std::pair<dsmc::FocalSet, double>> entries;
  for (const auto& [set, v] : m) entries.emplace_back(to_set(static_cast<int>(frame->size()), set), v);
  return dsmc::MassFunction::make(frame, entries);
}

inline RawMass to_raw(const dsmc::MassFunction& m) {
  RawMass out;
  for (const auto& [set, v] : m.entries()) out[to_mask(set)] = v;
  return out;
}

inline double raw_bel(const RawMass& m, Mask b) {
  double s = 0.0;
  for (const auto& [a, v] : m) {
    if ((a & ~b) == 0) s += v;
  }
  return s;
}

inline double max_abs_diff(const RawMass& a, const RawMass& b) {
  double worst = 0.0;
  for (const auto& [k, v] : a) worst = std::max(worst, std::abs(v - (b.count(k) ? b.at(k) : 0.0)));
  for (const auto& [k, v] : b) worst = std::max(worst, std::abs(v - (a.count(k) ? a.at(k) : 0.0)));
  return worst;
}

// ---- propositional literal fragment --------------------------------------

// A conjunction of literals: bit j of pos (neg) means atom j (its negation).
struct RawTerms {
  Mask pos = 0;
  Mask neg = 0;
};

struct RawLogicProblem {
  int atoms = 0;
  std::vector<std::vector<std::pair<double, RawTerms>>> sources;
};

inline bool satisfies(Mask assignment, RawTerms t) {
  return (t.pos & ~assignment) == 0 && (t.neg & assignment) == 0;
}

// Clause as a disjunction of literals, evaluated semantically.
inline bool clause_holds(Mask assignment, RawTerms clause) {
  return (clause.pos & assignment) != 0 || (clause.neg & ~assignment) != 0;
}

// Bel of a clause by model checking: a consistent conjunction supports the
// clause iff every assignment satisfying it satisfies the clause.
inline OracleBelief oracle_logic_belief(const RawLogicProblem& p, RawTerms clause) {
  const Mask assignments = Mask{1} << p.atoms;
  double empty = 0.0;
  double inside = 0.0;
  std::function<void(std::size_t, double, RawTerms)> rec = [&](std::size_t i, double prob, RawTerms acc) {
    if (i == p.sources.size()) {
      bool any_model = false;
      bool all_hold = true;
      for (Mask a = 0; a < assignments; ++a) {
        if (!satisfies(a, acc)) continue;
        any_model = true;
        all_hold = all_hold && clause_holds(a, clause);
      }
      if (!any_model) empty += prob;
      else if (all_hold) inside += prob;
      return;
    }
    for (const auto& [q, t] : p.sources[i]) rec(i + 1, prob * q, {acc.pos | t.pos, acc.neg | t.neg});
  };
  rec(0, 1.0, {});
  return {inside / (1.0 - empty), empty};
}

inline RawTerms random_consistent_terms(std::mt19937_64& g, int atoms, double density) {
  std::bernoulli_distribution take(density);
  std::bernoulli_distribution sign(0.5);
  RawTerms t;
  for (int j = 0; j < atoms; ++j) {
    if (!take(g)) continue;
    (sign(g) ? t.pos : t.neg) |= Mask{1} << j;
  }
  return t;
}

inline RawLogicProblem random_logic_problem(std::mt19937_64& g, int max_atoms, int max_sources,
                                            double max_conflict = 0.9) {
  for (;;) {
    RawLogicProblem p;
    p.atoms = std::uniform_int_distribution<int>(1, max_atoms)(g);
    const int m = std::uniform_int_distribution<int>(1, max_sources)(g);
    for (int i = 0; i < m; ++i) {
      const auto k = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 3)(g));
      std::vector<std::pair<double, RawTerms>> s;
      for (double q : random_probabilities(g, k)) s.emplace_back(q, random_consistent_terms(g, p.atoms, 0.4));
      p.sources.push_back(std::move(s));
    }
    if (oracle_logic_belief(p, {1, 0}).conflict <= max_conflict) return p;
  }
}

inline RawTerms random_clause(std::mt19937_64& g, int atoms) {
  for (;;) {
    RawTerms c = random_consistent_terms(g, atoms, 0.5);
    if (c.pos != 0 || c.neg != 0) return c;
  }
}

inline std::vector<dsmc::Literal> to_literals(RawTerms t, int atoms) {
  std::vector<dsmc::Literal> out;
  for (int j = 0; j < atoms; ++j) {
    if ((t.pos >> j) & 1u) out.push_back({static_cast<std::uint32_t>(j), true});
    if ((t.neg >> j) & 1u) out.push_back({static_cast<std::uint32_t>(j), false});
  }
  return out;
}

inline dsmc::LogicProblem to_logic_problem(const RawLogicProblem& p) {
  std::vector<dsmc::LogicSource> sources;
  for (const auto& s : p.sources) {
    dsmc::LogicSource src;
    for (const auto& [q, t] : s) src.outcomes.push_back({q, dsmc::TermSet(to_literals(t, p.atoms))});
    sources.push_back(std::move(src));
  }
  return dsmc::LogicProblem(labels(p.atoms, "a"), std::move(sources));
}

inline dsmc::ClauseQuery to_clause(RawTerms c, int atoms) { return {to_literals(c, atoms)}; }

}  // namespace dsmc_test
