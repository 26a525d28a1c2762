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

#include "dsmc/logic.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "dsmc/error.hpp"
#include "numfmt.hpp"

namespace dsmc {

TermSet::TermSet(std::initializer_list<Literal> literals)
    : TermSet(std::vector<Literal>(literals)) {}

TermSet::TermSet(std::vector<Literal> literals) : literals_(std::move(literals)) {
  std::sort(literals_.begin(), literals_.end());
  literals_.erase(std::unique(literals_.begin(), literals_.end()), literals_.end());
}

bool TermSet::contains(Literal l) const {
  return std::binary_search(literals_.begin(), literals_.end(), l);
}

LogicProblem::LogicProblem(std::vector<std::string> atoms, std::vector<LogicSource> sources)
    : atoms_(std::move(atoms)), sources_(std::move(sources)) {
  for (std::uint32_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].empty()) throw InvalidInput("atom " + std::to_string(i) + " has an empty name");
    if (!index_.emplace(atoms_[i], i).second) {
      throw InvalidInput("duplicate atom '" + atoms_[i] + "'");
    }
  }
}

std::optional<std::uint32_t> LogicProblem::atom_index(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> validate_logic_problem(const LogicProblem& p) {
  std::vector<std::string> report;
  if (p.atoms().empty()) report.emplace_back("problem has no atoms");
  if (p.sources().empty()) report.emplace_back("problem has no sources");
  for (std::size_t i = 0; i < p.sources().size(); ++i) {
    const auto& s = p.sources()[i];
    const std::string src = "source " + std::to_string(i);
    if (s.outcomes.empty()) {
      report.push_back(src + ": no outcomes");
      continue;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < s.outcomes.size(); ++k) {
      const auto& o = s.outcomes[k];
      const std::string where = src + " outcome " + std::to_string(k);
      if (!(o.probability > 0.0) || !std::isfinite(o.probability)) {
        report.push_back(where + ": probability " + detail::format_short(o.probability) +
                         " is not positive");
      }
      for (const Literal& l : o.terms.literals()) {
        if (l.atom >= p.atoms().size()) {
          report.push_back(where + ": unknown atom index " + std::to_string(l.atom));
        }
      }
      if (is_contradictory(o.terms)) report.push_back(where + ": contradictory terms");
      total += o.probability;
    }
    if (!(std::abs(total - 1.0) <= kNormalizationTolerance)) {
      report.push_back(src + ": probabilities sum to " + detail::format_short(total));
    }
  }
  return report;
}

bool is_contradictory(const TermSet& t) {
  // Sorted by (atom, sign): a complementary pair is adjacent.
  const auto& lits = t.literals();
  for (std::size_t i = 1; i < lits.size(); ++i) {
    if (lits[i].atom == lits[i - 1].atom) return true;
  }
  return false;
}

bool is_tautology(const ClauseQuery& c) {
  for (const Literal& l : c.literals) {
    if (std::find(c.literals.begin(), c.literals.end(), l.complement()) != c.literals.end()) return true;
  }
  return false;
}

bool entails(const TermSet& t, const ClauseQuery& c) {
  if (is_contradictory(t)) throw ContractViolation("entailment from a contradictory term set");
  if (is_tautology(c)) return true;
  return std::any_of(c.literals.begin(), c.literals.end(),
                     [&](const Literal& l) { return t.contains(l); });
}

// ---------------------------------------------------------------------------
// Estimation

namespace {

enum class TrialEnd { kSuccess, kFailure, kTimeout };

class LogicTrial {
 public:
  LogicTrial(const LogicProblem& p, const std::vector<SourceSampler>& samplers,
             const ClauseQuery& c, bool tautology)
      : p_(p), samplers_(samplers), clause_(c), tautology_(tautology), state_(p.atoms().size(), 0) {}

  TrialEnd run(Rng& rng, std::uint64_t budget, std::uint64_t cap, std::uint64_t& restarts) {
    std::uint64_t steps = 0;
    for (std::uint64_t rejected = 0;;) {
      clear();
      bool consistent = true;
      // One draw per source, in order, before any checking.
      for (std::size_t i = 0; i < samplers_.size(); ++i) choice_[i] = samplers_[i](rng);
      for (std::size_t i = 0; i < samplers_.size() && consistent; ++i) {
        const TermSet& t = p_.sources()[i].outcomes[choice_[i]].terms;
        for (const Literal& l : t.literals()) {
          if (steps++ == budget) return timeout(restarts, rejected);
          const std::int8_t want = l.positive ? 1 : -1;
          if (state_[l.atom] == -want) {
            consistent = false;
            break;
          }
          if (state_[l.atom] == 0) {
            state_[l.atom] = want;
            touched_.push_back(l.atom);
          }
        }
      }
      if (!consistent) {
        if (++rejected > cap) {
          restarts += rejected;
          throw ExcessiveConflict("restart cap exceeded within one trial", 1.0);
        }
        continue;
      }
      restarts += rejected;
      if (tautology_) return TrialEnd::kSuccess;
      for (const Literal& l : clause_.literals) {
        if (steps++ == budget) return TrialEnd::kTimeout;
        if (state_[l.atom] == (l.positive ? 1 : -1)) return TrialEnd::kSuccess;
      }
      return TrialEnd::kFailure;
    }
  }

  void prepare() { choice_.resize(samplers_.size()); }

 private:
  TrialEnd timeout(std::uint64_t& restarts, std::uint64_t rejected) {
    restarts += rejected;
    return TrialEnd::kTimeout;
  }

  void clear() {
    for (std::uint32_t a : touched_) state_[a] = 0;
    touched_.clear();
  }

  const LogicProblem& p_;
  const std::vector<SourceSampler>& samplers_;
  const ClauseQuery& clause_;
  bool tautology_;
  std::vector<std::int8_t> state_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::size_t> choice_;
};

SourceModel sampler_view(const LogicSource& s) {
  // Only probabilities matter to the sampler; targets are placeholders.
  std::vector<Outcome> outcomes;
  outcomes.reserve(s.outcomes.size());
  for (const auto& o : s.outcomes) outcomes.push_back({o.probability, FocalSet(1)});
  return SourceModel(nullptr, std::move(outcomes));
}

struct LogicTally {
  std::uint64_t successes = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t restarts = 0;
  std::uint64_t completed = 0;
  std::exception_ptr error;
};

}  // namespace

BoundedEstimate logic_estimate(const LogicProblem& p, const ClauseQuery& c,
                               const TrialEngineConfig& cfg, std::uint64_t step_budget) {
  cfg.validate();
  if (auto report = validate_logic_problem(p); !report.empty()) {
    std::string msg;
    for (const auto& line : report) msg += (msg.empty() ? "" : "\n") + line;
    throw InvalidInput(msg);
  }
  if (c.literals.empty()) throw InvalidInput("clause query is empty");
  for (const Literal& l : c.literals) {
    if (l.atom >= p.atoms().size()) throw InvalidInput("clause mentions an unknown atom");
  }
  if (step_budget == 0) throw InvalidInput("step budget must be positive");

  std::vector<SourceSampler> samplers;
  samplers.reserve(p.sources().size());
  for (const auto& s : p.sources()) samplers.emplace_back(sampler_view(s));
  const bool tautology = is_tautology(c);

  std::vector<LogicTally> tallies(cfg.workers);
  auto work = [&](unsigned w) {
    LogicTally& t = tallies[w];
    LogicTrial trial(p, samplers, c, tautology);
    trial.prepare();
    const std::uint64_t begin = cfg.trials / cfg.workers * w + std::min<std::uint64_t>(w, cfg.trials % cfg.workers);
    const std::uint64_t count = cfg.trials / cfg.workers + (w < cfg.trials % cfg.workers ? 1 : 0);
    try {
      for (std::uint64_t i = begin; i < begin + count; ++i) {
        Rng rng = Rng::stream(cfg.seed, i);
        switch (trial.run(rng, step_budget, cfg.restart_cap, t.restarts)) {
          case TrialEnd::kSuccess: ++t.successes; break;
          case TrialEnd::kTimeout: ++t.timeouts; break;
          case TrialEnd::kFailure: break;
        }
        ++t.completed;
      }
    } catch (...) {
      t.error = std::current_exception();
    }
  };
  if (cfg.workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < cfg.workers; ++w) pool.emplace_back(work, w);
  }

  LogicTally total;
  for (const auto& t : tallies) {
    total.successes += t.successes;
    total.timeouts += t.timeouts;
    total.restarts += t.restarts;
    total.completed += t.completed;
  }
  for (const auto& t : tallies) {
    if (!t.error) continue;
    try {
      std::rethrow_exception(t.error);
    } catch (const ExcessiveConflict&) {
      const double kappa = static_cast<double>(total.restarts) /
                           static_cast<double>(total.restarts + total.completed);
      throw ExcessiveConflict("excessive conflict: restart cap of " + std::to_string(cfg.restart_cap) +
                                  " exceeded within one trial; conflict estimate so far " +
                                  detail::format_short(kappa),
                              kappa);
    }
  }

  BoundedEstimate e;
  const double n = static_cast<double>(cfg.trials);
  e.trials = cfg.trials;
  e.successes = total.successes;
  e.timeouts = total.timeouts;
  e.restarts = total.restarts;
  e.lower = static_cast<double>(total.successes) / n;
  e.upper = static_cast<double>(total.successes + total.timeouts) / n;
  e.sd_bound = sd_bound_for(cfg.trials);
  e.conflict_estimate = static_cast<double>(total.restarts) / static_cast<double>(total.restarts + cfg.trials);
  return e;
}

// ---------------------------------------------------------------------------
// Translation to a set problem

namespace {

bool satisfies(std::size_t assignment, const Literal& l) {
  return ((assignment >> l.atom) & 1u) == (l.positive ? 1u : 0u);
}

std::string assignment_label(const std::vector<std::string>& atoms, std::size_t a) {
  std::string label;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) label += '&';
    if (((a >> i) & 1u) == 0) label += '!';
    label += atoms[i];
  }
  return label;
}

void check_atoms(std::size_t k) {
  if (k > kMaxTranslateAtoms) {
    throw ResourceLimit("translation to a set problem supports at most " +
                        std::to_string(kMaxTranslateAtoms) + " atoms; problem has " + std::to_string(k));
  }
}

}  // namespace

FocalSet satisfying_set(std::size_t atom_count, const TermSet& t) {
  check_atoms(atom_count);
  const std::size_t size = std::size_t{1} << atom_count;
  FocalSet s(size);
  for (std::size_t a = 0; a < size; ++a) {
    if (std::all_of(t.literals().begin(), t.literals().end(),
                    [&](const Literal& l) { return satisfies(a, l); })) {
      s.insert(a);
    }
  }
  return s;
}

FocalSet satisfying_set(std::size_t atom_count, const ClauseQuery& c) {
  check_atoms(atom_count);
  const std::size_t size = std::size_t{1} << atom_count;
  FocalSet s(size);
  for (std::size_t a = 0; a < size; ++a) {
    if (std::any_of(c.literals.begin(), c.literals.end(),
                    [&](const Literal& l) { return satisfies(a, l); })) {
      s.insert(a);
    }
  }
  return s;
}

EvidenceProblem translate_to_set_problem(const LogicProblem& p) {
  const std::size_t k = p.atoms().size();
  check_atoms(k);
  if (auto report = validate_logic_problem(p); !report.empty()) throw InvalidInput(report.front());
  std::vector<std::string> labels;
  labels.reserve(std::size_t{1} << k);
  for (std::size_t a = 0; a < (std::size_t{1} << k); ++a) labels.push_back(assignment_label(p.atoms(), a));
  FramePtr frame = Frame::make(std::move(labels));

  std::vector<SourceModel> sources;
  for (const auto& s : p.sources()) {
    std::vector<Outcome> outcomes;
    for (const auto& o : s.outcomes) outcomes.push_back({o.probability, satisfying_set(k, o.terms)});
    sources.emplace_back(frame, std::move(outcomes));
  }
  return EvidenceProblem(frame, std::move(sources));
}

}  // namespace dsmc
