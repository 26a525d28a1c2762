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
#include <optional>
#include <string>
#include <vector>

#include "dsmc/evidence.hpp"
#include "dsmc/exact.hpp"

namespace dsmc {

/// Random problems of `sources` simple support functions over a frame of
/// `frame_size` elements labelled x1..xn.
struct GeneratorSpec {
  std::size_t sources = 1;
  std::size_t frame_size = 1;
  double weight_lo = 0.1;
  double weight_hi = 0.9;
  /// Probability that each element joins a focus (foci are redrawn if empty).
  double focus_density = 0.5;
  std::uint64_t seed = 0;
  /// Trials used to measure the conflict of the generated problem.
  std::uint64_t conflict_trials = 20'000;

  /// Throws InvalidInput unless m, n >= 1, 0 < lo <= hi < 1, 0 < density <= 1.
  void validate() const;
};

struct GeneratedProblem {
  EvidenceProblem problem;
  double focus_density = 0.0;
  /// Measured Monte-Carlo conflict; 1 if the restart cap was hit.
  double kappa_hat = 0.0;
};

/// Deterministic for a fixed spec. For one seed, raising the density only
/// grows each focus, so measured conflict falls as density rises.
GeneratedProblem generate_problem(const GeneratorSpec& spec);

/// Bisects the focus density (at most `max_probes` generations) for a
/// measured conflict close to `target_kappa`; returns the closest probe.
GeneratedProblem generate_for_conflict(GeneratorSpec spec, double target_kappa, int max_probes = 20);

enum class BenchQuery {
  kHalfFrame,  ///< {x1 .. x_ceil(n/2)}
  kWholeFrame,
};

struct BenchOptions {
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  int repetitions = 3;
  unsigned workers = 1;
  bool simple_support_path = false;
  BenchQuery query = BenchQuery::kHalfFrame;
  double weight_lo = 0.1;
  double weight_hi = 0.9;
  double focus_density = 0.5;
  /// When set, each cell's density is tuned toward this conflict.
  std::optional<double> target_conflict = 0.5;
  /// Limits for the mass-based exact column; default 2^20 focal sets, 60 s.
  CombineLimits exact_limits{std::size_t{1} << 20, std::chrono::seconds(60)};
};

/// One cell of the timing comparison.
struct BenchRow {
  std::size_t m = 0;
  std::size_t n = 0;
  double focus_density = 0.0;
  double kappa_hat = 0.0;
  double draws_per_trial = 0.0;
  std::uint64_t trials = 0;
  double mc_ms = 0.0;
  double mc_value = 0.0;
  std::optional<double> exact_ms;  ///< absent when the exact run was capped
  std::optional<double> exact_value;
  std::optional<double> abs_error;
  std::string note;
};

BenchRow run_bench_cell(std::size_t m, std::size_t n, const BenchOptions& options);

/// Every (m, n) of the grid, m-major.
std::vector<BenchRow> run_bench(const std::vector<std::size_t>& ms, const std::vector<std::size_t>& ns,
                                const BenchOptions& options);

/// Least-squares slope of log(mc_ms) against log(m n).
struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

ScalingFit fit_scaling(const std::vector<BenchRow>& rows);

}  // namespace dsmc
