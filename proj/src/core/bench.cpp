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

#include "dsmc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "dsmc/error.hpp"
#include "dsmc/mc.hpp"
#include "dsmc/rng.hpp"

namespace dsmc {

void GeneratorSpec::validate() const {
  if (sources < 1 || frame_size < 1) throw InvalidInput("generator needs m >= 1 and n >= 1");
  if (!(weight_lo > 0.0 && weight_lo <= weight_hi && weight_hi < 1.0)) {
    throw InvalidInput("weight range must satisfy 0 < lo <= hi < 1");
  }
  if (!(focus_density > 0.0 && focus_density <= 1.0)) {
    throw InvalidInput("focus density must lie in (0, 1]");
  }
  if (conflict_trials == 0) throw InvalidInput("conflict trial count must be positive");
}

namespace {

double measure_conflict(const EvidenceProblem& p, const GeneratorSpec& spec) {
  TrialEngineConfig cfg;
  cfg.trials = spec.conflict_trials;
  cfg.seed = Rng::derive(spec.seed, 0xc0ff1c7);
  try {
    return conflict_estimate(p, cfg).kappa_hat;
  } catch (const ExcessiveConflict&) {
    return 1.0;
  }
}

}  // namespace

GeneratedProblem generate_problem(const GeneratorSpec& spec) {
  spec.validate();
  std::vector<std::string> labels;
  labels.reserve(spec.frame_size);
  for (std::size_t j = 0; j < spec.frame_size; ++j) labels.push_back("x" + std::to_string(j + 1));
  FramePtr frame = Frame::make(std::move(labels));

  // Separate streams keep weights and the first focus draw independent of
  // the density, which is what makes foci grow monotonically with it.
  Rng weights = Rng::stream(spec.seed, 0);
  Rng membership = Rng::stream(spec.seed, 1);
  Rng redraws = Rng::stream(spec.seed, 2);

  std::vector<SourceModel> sources;
  sources.reserve(spec.sources);
  for (std::size_t i = 0; i < spec.sources; ++i) {
    const double s = spec.weight_lo + (spec.weight_hi - spec.weight_lo) * weights.uniform();
    FocalSet focus(spec.frame_size);
    for (std::size_t j = 0; j < spec.frame_size; ++j) {
      if (membership.uniform() < spec.focus_density) focus.insert(j);
    }
    while (focus.empty()) {
      for (std::size_t j = 0; j < spec.frame_size; ++j) {
        if (redraws.uniform() < spec.focus_density) focus.insert(j);
      }
    }
    sources.push_back(SimpleSupport{std::move(focus), s}.to_source(frame));
  }
  EvidenceProblem problem(frame, std::move(sources));
  const double kappa = measure_conflict(problem, spec);
  return {std::move(problem), spec.focus_density, kappa};
}

GeneratedProblem generate_for_conflict(GeneratorSpec spec, double target_kappa, int max_probes) {
  if (!(target_kappa >= 0.0 && target_kappa < 1.0)) {
    throw InvalidInput("target conflict must lie in [0, 1)");
  }
  if (max_probes < 1) throw InvalidInput("at least one probe is required");
  double lo = 0.0;  // sparse foci: high conflict
  double hi = 1.0;  // dense foci: low conflict
  std::optional<GeneratedProblem> best;
  for (int probe = 0; probe < max_probes; ++probe) {
    spec.focus_density = 0.5 * (lo + hi);
    GeneratedProblem g = generate_problem(spec);
    if (!best || std::abs(g.kappa_hat - target_kappa) < std::abs(best->kappa_hat - target_kappa)) {
      best = g;
    }
    if (g.kappa_hat > target_kappa) {
      lo = spec.focus_density;
    } else {
      hi = spec.focus_density;
    }
  }
  return std::move(*best);
}

// ---------------------------------------------------------------------------
// Bench

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

BenchRow run_bench_cell(std::size_t m, std::size_t n, const BenchOptions& options) {
  if (options.repetitions < 1) throw InvalidInput("repetitions must be positive");
  GeneratorSpec spec;
  spec.sources = m;
  spec.frame_size = n;
  spec.weight_lo = options.weight_lo;
  spec.weight_hi = options.weight_hi;
  spec.focus_density = options.focus_density;
  spec.seed = Rng::derive(options.seed, m * 1'000'003 + n);
  GeneratedProblem g = options.target_conflict ? generate_for_conflict(spec, *options.target_conflict)
                                               : generate_problem(spec);

  BenchRow row;
  row.m = m;
  row.n = n;
  row.focus_density = g.focus_density;
  row.trials = options.trials;

  FocalSet query = g.problem.frame()->full_set();
  if (options.query == BenchQuery::kHalfFrame) {
    query = FocalSet(n);
    for (std::size_t j = 0; j < (n + 1) / 2; ++j) query.insert(j);
  }

  TrialEngineConfig cfg;
  cfg.trials = options.trials;
  cfg.seed = options.seed;
  cfg.workers = options.workers;
  cfg.simple_support_path = options.simple_support_path;

  std::vector<double> times;
  Estimate e;
  try {
    for (int r = 0; r < options.repetitions; ++r) {
      const auto start = Clock::now();
      e = estimate(g.problem, {query}, cfg).front();
      times.push_back(elapsed_ms(start));
    }
  } catch (const ExcessiveConflict& ex) {
    row.kappa_hat = ex.kappa_hat();
    row.note = "mc: excessive conflict";
    return row;
  }
  row.mc_ms = median(times);
  row.mc_value = e.value;
  row.kappa_hat = e.conflict_estimate;
  row.draws_per_trial = e.draws_per_trial();

  try {
    const auto start = Clock::now();
    CombinationResult exact = combine_all(g.problem, options.exact_limits);
    row.exact_value = bel_from_mass(exact.combined, query);
    row.exact_ms = elapsed_ms(start);
    row.abs_error = std::abs(row.mc_value - *row.exact_value);
  } catch (const ResourceLimit& ex) {
    row.note = std::string("exact capped: ") + ex.what();
  } catch (const TotalConflict& ex) {
    row.note = std::string("exact: ") + ex.what();
  }
  return row;
}

std::vector<BenchRow> run_bench(const std::vector<std::size_t>& ms, const std::vector<std::size_t>& ns,
                                const BenchOptions& options) {
  std::vector<BenchRow> rows;
  rows.reserve(ms.size() * ns.size());
  for (std::size_t m : ms) {
    for (std::size_t n : ns) rows.push_back(run_bench_cell(m, n, options));
  }
  return rows;
}

ScalingFit fit_scaling(const std::vector<BenchRow>& rows) {
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (r.mc_ms <= 0.0) continue;
    xs.push_back(std::log(static_cast<double>(r.m * r.n)));
    ys.push_back(std::log(r.mc_ms));
  }
  ScalingFit fit;
  fit.points = xs.size();
  if (xs.size() < 2) return fit;
  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.exponent = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.exponent * mx;
  return fit;
}

}  // namespace dsmc
