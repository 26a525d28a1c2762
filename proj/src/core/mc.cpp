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

#include "dsmc/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <unordered_map>

#include "dsmc/error.hpp"
#include "numfmt.hpp"

namespace dsmc {

void TrialEngineConfig::validate() const {
  if (trials == 0) throw InvalidInput("trial count must be positive");
  if (restart_cap == 0) throw InvalidInput("restart cap must be positive");
  if (workers == 0) throw InvalidInput("worker count must be positive");
}

std::uint64_t plan_trials(double accuracy) {
  if (!(accuracy > 0.0 && accuracy <= 1.0)) {
    throw InvalidInput("accuracy must lie in (0, 1]; got " + detail::format_short(accuracy));
  }
  // The relative nudge absorbs rounding in k*k so exact quotients are not bumped up.
  const double n = 9.0 / (4.0 * accuracy * accuracy);
  return static_cast<std::uint64_t>(std::ceil(n * (1.0 - 1e-12)));
}

double sd_bound_for(std::uint64_t trials) {
  return trials == 0 ? 0.5 : 0.5 / std::sqrt(static_cast<double>(trials));
}

// ---------------------------------------------------------------------------
// Sampling

SourceSampler::SourceSampler(const SourceModel& source) {
  cumulative_.reserve(source.size());
  double total = 0.0;
  for (const Outcome& o : source.outcomes()) {
    total += o.probability;
    cumulative_.push_back(total);
  }
  // Probabilities are validated to sum to 1 within 1e-9; rescale so the
  // table ends at exactly 1.
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

std::size_t SourceSampler::index_for(double u) const {
  if (cumulative_.size() <= 8) {
    std::size_t i = 0;
    while (i + 1 < cumulative_.size() && u >= cumulative_[i]) ++i;
    return i;
  }
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
}

TrialKernel::TrialKernel(const EvidenceProblem& p, JointSampler joint)
    : universe_(p.frame() ? p.frame()->size() : 0),
      words_(FocalSet::words_for(universe_)),
      joint_(std::move(joint)) {
  require_valid(p);
  samplers_.reserve(p.size());
  offsets_.reserve(p.size());
  focus_.reserve(p.size());
  std::size_t total = 0;
  for (const auto& s : p.sources()) {
    offsets_.push_back(total);
    total += s.size();
  }
  targets_.reserve(total * words_);
  for (const auto& s : p.sources()) {
    samplers_.emplace_back(s);
    for (const Outcome& o : s.outcomes()) {
      auto w = o.target.words();
      targets_.insert(targets_.end(), w.begin(), w.end());
    }
    auto f = simple_support_focus(s);
    simple_support_ = simple_support_ && f.has_value();
    focus_.push_back(f.value_or(0));
  }
}

void TrialKernel::draw(Rng& rng, std::span<std::size_t> choice) const {
  if (joint_) {
    joint_(rng, choice);
    for (std::size_t i = 0; i < choice.size(); ++i) {
      if (choice[i] >= samplers_[i].size()) {
        throw ContractViolation("joint sampler chose outcome " + std::to_string(choice[i]) +
                                " for source " + std::to_string(i) + " which has " +
                                std::to_string(samplers_[i].size()));
      }
    }
    return;
  }
  for (std::size_t i = 0; i < samplers_.size(); ++i) choice[i] = samplers_[i](rng);
}

void TrialScratch::fit(const TrialKernel& k) {
  choice.resize(k.source_count());
  rows.resize(k.source_count());
  gamma.resize(k.word_count());
}

// ---------------------------------------------------------------------------
// Trials

namespace {

[[noreturn]] void throw_cap(std::uint64_t cap) {
  throw ExcessiveConflict("restart cap of " + std::to_string(cap) + " exceeded within one trial", 1.0);
}

// Draws until the intersection is non-empty and leaves it in scratch.gamma.
// Returns the number of rejected draws.
std::uint64_t draw_nonempty(const TrialKernel& k, Rng& rng, std::uint64_t cap, TrialScratch& s) {
  const std::size_t m = k.source_count();
  const std::size_t words = k.word_count();
  for (std::uint64_t restarts = 0;; ) {
    k.draw(rng, s.choice);
    std::fill(s.gamma.begin(), s.gamma.end(), ~FocalSet::Word{0});
    for (std::size_t i = 0; i < m; ++i) {
      auto t = k.target(i, s.choice[i]);
      for (std::size_t w = 0; w < words; ++w) s.gamma[w] &= t[w];
    }
    if (std::any_of(s.gamma.begin(), s.gamma.end(), [](FocalSet::Word w) { return w != 0; })) {
      return restarts;
    }
    if (++restarts > cap) throw_cap(cap);
  }
}

bool words_subset(std::span<const FocalSet::Word> a, std::span<const FocalSet::Word> b) {
  for (std::size_t w = 0; w < a.size(); ++w) {
    if (a[w] & ~b[w]) return false;
  }
  return true;
}

}  // namespace

TrialResult run_trial(const TrialKernel& k, const FocalSet& b, Rng& rng, std::uint64_t restart_cap,
                      TrialScratch& s) {
  if (b.universe() != k.universe()) throw FrameMismatch("query width does not match the problem frame");
  s.fit(k);
  const std::size_t m = k.source_count();
  const std::size_t words = k.word_count();
  auto bw = b.words();
  for (std::uint64_t restarts = 0;;) {
    k.draw(rng, s.choice);
    for (std::size_t i = 0; i < m; ++i) s.rows[i] = k.target(i, s.choice[i]).data();

    // Scan the frame a word at a time; stop at the first member outside b.
    bool nonempty = false;
    for (std::size_t w = 0; w < words; ++w) {
      FocalSet::Word g = s.rows[0][w];
      for (std::size_t i = 1; i < m && g != 0; ++i) g &= s.rows[i][w];
      if (g == 0) continue;
      nonempty = true;
      if (g & ~bw[w]) return {false, restarts};
    }
    if (nonempty) return {true, restarts};
    if (++restarts > restart_cap) throw_cap(restart_cap);
  }
}

TrialResult run_trial(const TrialKernel& k, const FocalSet& b, Rng& rng, std::uint64_t restart_cap) {
  TrialScratch s;
  return run_trial(k, b, rng, restart_cap, s);
}

TrialResult ssf_fast_trial(const TrialKernel& k, const FocalSet& b, Rng& rng,
                           std::uint64_t restart_cap, TrialScratch& s) {
  if (!k.simple_support()) {
    throw ContractViolation("simple-support kernel needs every source to be a simple support function");
  }
  if (k.has_joint_sampler()) {
    throw ContractViolation("simple-support kernel does not accept a joint sampler");
  }
  if (b.universe() != k.universe()) throw FrameMismatch("query width does not match the problem frame");
  s.fit(k);
  const std::size_t m = k.source_count();
  const std::size_t words = k.word_count();
  auto bw = b.words();
  const bool b_full = b.is_full();
  for (std::uint64_t restarts = 0;;) {
    std::size_t active = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t focus = k.focus_index(i);
      if (k.sampler(i).index_for(rng.uniform()) == focus) s.rows[active++] = k.target(i, focus).data();
    }
    // No active focus: the intersection is the whole frame.
    if (active == 0) return {b_full, restarts};

    bool nonempty = false;
    bool inside = true;
    for (std::size_t w = 0; w < words; ++w) {
      FocalSet::Word g = s.rows[0][w];
      for (std::size_t a = 1; a < active && g != 0; ++a) g &= s.rows[a][w];
      if (g == 0) continue;
      nonempty = true;
      if (g & ~bw[w]) {
        inside = false;
        break;
      }
    }
    if (nonempty) return {inside, restarts};
    if (++restarts > restart_cap) throw_cap(restart_cap);
  }
}

TrialResult ssf_fast_trial(const TrialKernel& k, const FocalSet& b, Rng& rng,
                           std::uint64_t restart_cap) {
  TrialScratch s;
  return ssf_fast_trial(k, b, rng, restart_cap, s);
}

// ---------------------------------------------------------------------------
// Parallel driver

namespace {

struct WorkerTally {
  std::vector<std::uint64_t> successes;
  std::uint64_t restarts = 0;
  std::uint64_t completed = 0;
  std::exception_ptr error;
};

std::uint64_t worker_share(std::uint64_t n, unsigned w, unsigned workers) {
  return n / workers + (w < n % workers ? 1 : 0);
}

// Runs body(worker, rng, trials, tally) on each worker's substream and merges the
// tallies in worker order. A capped trial is charged cap + 1 restarts and
// surfaces as ExcessiveConflict with the run's conflict estimate so far.
template <class Body>
WorkerTally run_workers(const TrialEngineConfig& cfg, std::size_t slots, Body body) {
  cfg.validate();
  std::vector<WorkerTally> tallies(cfg.workers);
  auto work = [&](unsigned w) {
    WorkerTally& t = tallies[w];
    t.successes.assign(slots, 0);
    Rng rng = Rng::stream(cfg.seed, w);
    try {
      body(w, rng, worker_share(cfg.trials, w, cfg.workers), t);
    } catch (const ExcessiveConflict&) {
      t.restarts += cfg.restart_cap + 1;
      t.error = std::current_exception();
    } catch (...) {
      t.error = std::current_exception();
    }
  };
  if (cfg.workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(cfg.workers);
    for (unsigned w = 0; w < cfg.workers; ++w) pool.emplace_back(work, w);
  }

  WorkerTally total;
  total.successes.assign(slots, 0);
  for (const auto& t : tallies) {
    for (std::size_t q = 0; q < slots; ++q) total.successes[q] += t.successes[q];
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
  return total;
}

Estimate make_estimate(std::uint64_t trials, std::uint64_t successes, std::uint64_t restarts) {
  Estimate e;
  e.trials = trials;
  e.successes = successes;
  e.restarts = restarts;
  const double n = static_cast<double>(trials);
  e.value = static_cast<double>(successes) / n;
  e.sd_bound = sd_bound_for(trials);
  e.plugin_sd = std::sqrt(e.value * (1.0 - e.value) / n);
  e.conflict_estimate = static_cast<double>(restarts) / static_cast<double>(restarts + trials);
  e.lower = std::max(0.0, e.value - 3.0 * e.sd_bound);
  e.upper = std::min(1.0, e.value + 3.0 * e.sd_bound);
  return e;
}

void check_batch(const EvidenceProblem& p, const QueryBatch& batch) {
  if (batch.empty()) throw InvalidInput("query batch is empty");
  for (const auto& q : batch) {
    if (q.universe() != p.frame()->size()) {
      throw FrameMismatch("query width " + std::to_string(q.universe()) +
                          " does not match frame size " + std::to_string(p.frame()->size()));
    }
  }
}

}  // namespace

std::vector<Estimate> estimate(const EvidenceProblem& p, const QueryBatch& batch,
                               const TrialEngineConfig& cfg, const JointSampler& joint) {
  const TrialKernel kernel(p, joint);
  check_batch(p, batch);
  if (cfg.simple_support_path && !kernel.simple_support()) {
    throw ContractViolation("simple-support path requested for a problem with other sources");
  }

  WorkerTally total;
  if (batch.size() == 1) {
    const FocalSet& b = batch.front();
    total = run_workers(cfg, 1, [&](unsigned, Rng& rng, std::uint64_t n, WorkerTally& t) {
      TrialScratch scratch;
      for (std::uint64_t i = 0; i < n; ++i) {
        const TrialResult r = cfg.simple_support_path
                                  ? ssf_fast_trial(kernel, b, rng, cfg.restart_cap, scratch)
                                  : run_trial(kernel, b, rng, cfg.restart_cap, scratch);
        t.successes[0] += r.success ? 1 : 0;
        t.restarts += r.restarts;
        ++t.completed;
      }
    });
  } else {
    total = run_workers(cfg, batch.size(), [&](unsigned, Rng& rng, std::uint64_t n, WorkerTally& t) {
      TrialScratch scratch;
      scratch.fit(kernel);
      for (std::uint64_t i = 0; i < n; ++i) {
        t.restarts += draw_nonempty(kernel, rng, cfg.restart_cap, scratch);
        for (std::size_t q = 0; q < batch.size(); ++q) {
          if (words_subset(scratch.gamma, batch[q].words())) ++t.successes[q];
        }
        ++t.completed;
      }
    });
  }

  std::vector<Estimate> out;
  out.reserve(batch.size());
  for (std::size_t q = 0; q < batch.size(); ++q) {
    out.push_back(make_estimate(cfg.trials, total.successes[q], total.restarts));
  }
  return out;
}

ConflictEstimate conflict_estimate(const EvidenceProblem& p, const TrialEngineConfig& cfg) {
  const Estimate e = estimate(p, {p.frame()->full_set()}, cfg).front();
  ConflictEstimate c;
  c.trials = e.trials;
  c.restarts = e.restarts;
  c.kappa_hat = e.conflict_estimate;
  c.expected_loops = 1.0 / (1.0 - c.kappa_hat);
  return c;
}

std::vector<SubsetFrequency> subset_frequency_scan(const EvidenceProblem& p,
                                                   const TrialEngineConfig& cfg,
                                                   std::size_t max_report) {
  const TrialKernel kernel(p);
  const std::size_t n = kernel.universe();
  std::vector<std::unordered_map<FocalSet, std::uint64_t>> tallies(cfg.workers);

  run_workers(cfg, 0, [&](unsigned w, Rng& rng, std::uint64_t trials, WorkerTally& t) {
    TrialScratch scratch;
    scratch.fit(kernel);
    FocalSet gamma(n);
    for (std::uint64_t i = 0; i < trials; ++i) {
      t.restarts += draw_nonempty(kernel, rng, cfg.restart_cap, scratch);
      gamma.assign_words(scratch.gamma);
      ++tallies[w][gamma];
      ++t.completed;
    }
  });

  std::unordered_map<FocalSet, std::uint64_t> merged;
  for (auto& t : tallies) {
    for (auto& [set, count] : t) merged[set] += count;
  }
  std::vector<SubsetFrequency> out;
  out.reserve(merged.size());
  for (auto& [set, count] : merged) {
    out.push_back({set, count, static_cast<double>(count) / static_cast<double>(cfg.trials)});
  }
  std::sort(out.begin(), out.end(), [](const SubsetFrequency& a, const SubsetFrequency& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.set < b.set;
  });
  if (out.size() > max_report) out.resize(max_report);
  return out;
}

}  // namespace dsmc
