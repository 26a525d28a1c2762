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

// Command-line front end. Talks to the engine only through the C API.

#include <dsmc/dsmc.h>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConflict = 3;
constexpr int kExitResource = 4;

constexpr const char* kBenchColumns =
    "m,n,focus_density,kappa_hat,draws_per_trial,trials,mc_ms,exact_ms,mc_value,exact_value,abs_error,note";

// Raised when a C API call fails; carries the exit code.
struct CallFailed {
  int exit_code;
};

int exit_code_for(dsmc_status s) {
  switch (s) {
    case DSMC_OK:
      return kExitOk;
    case DSMC_ERR_INPUT:
    case DSMC_ERR_CONTRACT:
      return kExitInput;
    case DSMC_ERR_CONFLICT:
      return kExitConflict;
    case DSMC_ERR_RESOURCE:
      return kExitResource;
    default:
      return 1;
  }
}

void check(dsmc_status s) {
  if (s == DSMC_OK) return;
  std::cerr << "error: " << dsmc_last_error() << '\n';
  if (s == DSMC_ERR_CONFLICT) {
    std::cerr << "conflict estimate: " << dsmc_last_conflict_estimate() << '\n';
  }
  throw CallFailed{exit_code_for(s)};
}

[[noreturn]] void input_error(const std::string& what) {
  std::cerr << "error: " << what << '\n';
  throw CallFailed{kExitInput};
}

std::string fixed7(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7f", v);
  return buf;
}

std::string sig7(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

struct ProblemDeleter {
  void operator()(dsmc_problem* p) const { dsmc_problem_free(p); }
};
using ProblemPtr = std::unique_ptr<dsmc_problem, ProblemDeleter>;

struct SetListDeleter {
  void operator()(dsmc_set_list* l) const { dsmc_set_list_free(l); }
};
using SetListPtr = std::unique_ptr<dsmc_set_list, SetListDeleter>;

struct StringDeleter {
  void operator()(char* s) const { dsmc_string_free(s); }
};

// Flags shared by the sampling subcommands.
struct SamplingFlags {
  std::string problem;
  std::vector<std::string> queries;
  std::optional<std::uint64_t> trials;
  std::optional<double> accuracy;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint64_t restart_cap = 10000;
  bool csv = false;
  bool logic = false;
  std::optional<std::uint64_t> budget;
  bool fast_path = false;
};

void add_problem_flags(CLI::App* cmd, SamplingFlags& f) {
  cmd->add_option("--problem", f.problem, "Problem file")->required();
  cmd->add_flag("--logic", f.logic, "Require a logic problem (atoms:/[literals]); queries are clauses");
  cmd->add_flag("--csv", f.csv, "Emit CSV (header + rows) instead of a table");
}

void add_sampling_flags(CLI::App* cmd, SamplingFlags& f) {
  auto* trials = cmd->add_option("--trials", f.trials, "Trial count N")->check(CLI::PositiveNumber);
  auto* accuracy = cmd->add_option("--accuracy", f.accuracy, "Plan N so that 3 sd_bound <= K");
  trials->excludes(accuracy);
  accuracy->excludes(trials);
  cmd->add_option("--seed", f.seed, "Seed (default 0)");
  cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--restart-cap", f.restart_cap, "Rejections allowed within one trial")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--fast-path", f.fast_path, "Use the simple-support fast path (every source must be one)");
}

ProblemPtr load(const SamplingFlags& f) {
  dsmc_problem* raw = nullptr;
  check(dsmc_problem_load(f.problem.c_str(), 1, &raw));
  ProblemPtr p(raw);
  if (f.logic != (dsmc_problem_is_logic(p.get()) != 0)) {
    input_error(f.logic ? "--logic given but the problem file is set-based"
                        : "problem file is a logic problem; pass --logic");
  }
  return p;
}

dsmc_config sampling_config(const SamplingFlags& f, std::ostream& note) {
  dsmc_config cfg;
  dsmc_config_default(&cfg);
  cfg.seed = f.seed;
  cfg.workers = f.workers;
  cfg.restart_cap = f.restart_cap;
  cfg.simple_support_path = f.fast_path ? 1 : 0;
  if (f.trials) cfg.trials = *f.trials;
  if (f.accuracy) {
    check(dsmc_plan_trials(*f.accuracy, &cfg.trials));
    note << "planned N=" << cfg.trials << " trials for accuracy " << *f.accuracy << '\n';
  }
  return cfg;
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

int cmd_estimate(const SamplingFlags& f) {
  if (f.budget && !f.logic) input_error("--budget applies to logic problems only");
  const ProblemPtr p = load(f);
  std::ostream& note = f.csv ? std::cerr : std::cout;
  const dsmc_config cfg = sampling_config(f, note);
  const std::vector<std::string> queries = f.queries.empty() ? std::vector<std::string>{"*"} : f.queries;

  if (f.csv) std::cout << "query,lower,upper,value,sd_bound,ci_lo,ci_hi,kappa_hat,trials,timeouts,wall_ms\n";
  else std::cout << "query\tvalue\tsd_bound\t3sd_interval\tkappa_hat\tN\twall_ms\n";

  auto emit = [&](const std::string& q, double lo, double hi, double value, double sd, double ci_lo,
                  double ci_hi, double kappa, std::uint64_t n, std::uint64_t timeouts, double ms) {
    if (f.csv) {
      std::cout << csv_field(q) << ',' << sig7(lo) << ',' << sig7(hi) << ',' << sig7(value) << ','
                << sig7(sd) << ',' << sig7(ci_lo) << ',' << sig7(ci_hi) << ',' << sig7(kappa) << ','
                << n << ',' << timeouts << ',' << sig7(ms) << '\n';
      return;
    }
    std::cout << q << '\t';
    if (lo != hi) std::cout << '[' << fixed7(lo) << ", " << fixed7(hi) << ']';
    else std::cout << fixed7(value);
    std::cout << '\t' << fixed7(sd) << "\t[" << fixed7(ci_lo) << ", " << fixed7(ci_hi) << "]\t"
              << fixed7(kappa) << '\t' << n << '\t' << fixed7(ms);
    if (timeouts > 0) std::cout << "\ttimeouts=" << timeouts;
    std::cout << '\n';
  };

  if (f.logic) {
    for (const auto& q : queries) {
      dsmc_bounded_estimate e;
      const auto start = std::chrono::steady_clock::now();
      check(dsmc_logic_estimate(p.get(), q.c_str(), &cfg, f.budget.value_or(0), &e));
      const double ms = ms_since(start);
      const double mid = 0.5 * (e.lower + e.upper);
      emit(q, e.lower, e.upper, mid, e.sd_bound, std::max(0.0, e.lower - 3 * e.sd_bound),
           std::min(1.0, e.upper + 3 * e.sd_bound), e.conflict_estimate, e.trials, e.timeouts, ms);
    }
    return kExitOk;
  }

  std::vector<dsmc_estimate> out(queries.size());
  const auto names = c_strings(queries);
  const auto start = std::chrono::steady_clock::now();
  check(dsmc_estimate_queries(p.get(), names.data(), names.size(), &cfg, out.data()));
  const double ms = ms_since(start);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const dsmc_estimate& e = out[i];
    emit(queries[i], e.value, e.value, e.value, e.sd_bound, e.lower, e.upper, e.conflict_estimate, e.trials,
         0, ms);
  }
  return kExitOk;
}

struct ExactFlags {
  std::string method = "mass";
  std::uint64_t max_focal = std::uint64_t{1} << 20;
  double time_limit = 0.0;
  std::uint64_t max_outcomes = 10'000'000;
  unsigned workers = 1;
};

dsmc_exact_options exact_options(const ExactFlags& e) {
  dsmc_exact_options o;
  dsmc_exact_options_default(&o);
  o.method = e.method == "enumerate" ? DSMC_EXACT_ENUMERATE : DSMC_EXACT_MASS;
  o.max_focal_sets = e.max_focal;
  o.time_limit_seconds = e.time_limit;
  o.max_outcomes = e.max_outcomes;
  o.workers = e.workers;
  return o;
}

void add_exact_flags(CLI::App* cmd, ExactFlags& e) {
  cmd->add_option("--method", e.method, "mass (combine focal sets) or enumerate (joint outcomes)")
      ->check(CLI::IsMember({"mass", "enumerate"}));
  cmd->add_option("--max-focal", e.max_focal, "Focal-set cap per combine step (mass)");
  cmd->add_option("--time-limit", e.time_limit, "Seconds before giving up (mass; 0 = none)");
  cmd->add_option("--max-outcomes", e.max_outcomes, "Joint outcome cap (enumerate)");
}

int cmd_exact(const SamplingFlags& f, const ExactFlags& ex) {
  const ProblemPtr p = load(f);
  const std::vector<std::string> queries = f.queries.empty() ? std::vector<std::string>{"*"} : f.queries;
  const dsmc_exact_options o = exact_options(ex);
  std::vector<dsmc_exact_result> out(queries.size());
  const auto names = c_strings(queries);
  const auto start = std::chrono::steady_clock::now();
  check(dsmc_exact_queries(p.get(), names.data(), names.size(), &o, out.data()));
  const double ms = ms_since(start);

  if (f.csv) std::cout << "query,bel,pl,kappa,wall_ms\n";
  else std::cout << "query\tbel\tpl\tkappa\twall_ms\n";
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (f.csv) {
      std::cout << csv_field(queries[i]) << ',' << sig7(out[i].bel) << ',' << sig7(out[i].pl) << ','
                << sig7(out[i].conflict) << ',' << sig7(ms) << '\n';
    } else {
      std::cout << queries[i] << '\t' << fixed7(out[i].bel) << '\t' << fixed7(out[i].pl) << '\t'
                << fixed7(out[i].conflict) << '\t' << fixed7(ms) << '\n';
    }
  }
  return kExitOk;
}

int cmd_conflict(const SamplingFlags& f, bool exact, std::size_t top, const ExactFlags& ex) {
  const ProblemPtr p = load(f);
  if (f.logic) input_error("conflict works on set-based problems");
  std::ostream& note = f.csv ? std::cerr : std::cout;
  const dsmc_config cfg = sampling_config(f, note);

  double kappa = 0.0;
  double loops = 0.0;
  check(dsmc_conflict_estimate(p.get(), &cfg, &kappa, &loops));
  std::optional<double> kappa_exact;
  if (exact) {
    const dsmc_exact_options o = exact_options(ex);
    double k = 0.0;
    check(dsmc_conflict_exact(p.get(), &o, &k));
    kappa_exact = k;
  }

  if (f.csv) {
    std::cout << "kappa_hat,expected_draws,kappa_exact,trials\n"
              << sig7(kappa) << ',' << sig7(loops) << ',' << (kappa_exact ? sig7(*kappa_exact) : "") << ','
              << cfg.trials << '\n';
  } else {
    std::cout << "kappa_hat\t" << fixed7(kappa) << "\nexpected_draws\t" << fixed7(loops) << '\n';
    if (kappa_exact) std::cout << "kappa_exact\t" << fixed7(*kappa_exact) << '\n';
    std::cout << "trials\t" << cfg.trials << '\n';
  }

  if (top > 0) {
    dsmc_set_list* raw = nullptr;
    check(dsmc_subset_scan(p.get(), &cfg, top, &raw));
    const SetListPtr list(raw);
    std::cout << (f.csv ? "set,frequency,count\n" : "set\tfrequency\tcount\n");
    for (std::size_t i = 0; i < dsmc_set_list_size(list.get()); ++i) {
      const std::string set = dsmc_set_list_set(list.get(), i);
      const double freq = dsmc_set_list_value(list.get(), i);
      const auto count = dsmc_set_list_count(list.get(), i);
      if (f.csv) std::cout << csv_field(set) << ',' << sig7(freq) << ',' << count << '\n';
      else std::cout << set << '\t' << fixed7(freq) << '\t' << count << '\n';
    }
  }
  return kExitOk;
}

struct BenchFlags {
  std::vector<std::size_t> ms{10, 20, 40};
  std::vector<std::size_t> ns{10, 20, 40};
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  int reps = 3;
  unsigned workers = 1;
  double target_conflict = 0.5;
  bool fixed_density = false;
  double density = 0.5;
  std::vector<double> weights{0.1, 0.9};
  double exact_timeout = 60.0;
  std::uint64_t max_focal = std::uint64_t{1} << 20;
  bool whole_frame = false;
  bool fast_path = false;
};

int cmd_bench(const BenchFlags& b) {
  dsmc_bench_options o;
  dsmc_bench_options_default(&o);
  o.trials = b.trials;
  o.seed = b.seed;
  o.repetitions = b.reps;
  o.workers = b.workers;
  o.simple_support_path = b.fast_path ? 1 : 0;
  o.whole_frame_query = b.whole_frame ? 1 : 0;
  o.weight_lo = b.weights.at(0);
  o.weight_hi = b.weights.at(1);
  o.focus_density = b.density;
  o.target_conflict = b.fixed_density ? -1.0 : b.target_conflict;
  o.exact_max_focal_sets = b.max_focal;
  o.exact_time_limit_seconds = b.exact_timeout;

  std::cout << kBenchColumns << '\n';
  std::vector<dsmc_bench_row> rows;
  std::optional<std::string> first_capped;
  int worst = kExitOk;
  for (std::size_t m : b.ms) {
    for (std::size_t n : b.ns) {
      dsmc_bench_row row{};
      const dsmc_status s = dsmc_bench_cell(&o, m, n, &row);
      if (s != DSMC_OK) {
        // Failed cells stay in the report; the run continues.
        row = dsmc_bench_row{};
        row.m = m;
        row.n = n;
        std::snprintf(row.note, sizeof row.note, "error: %s", dsmc_last_error());
        if (s == DSMC_ERR_INPUT) worst = kExitInput;
      } else {
        rows.push_back(row);
      }
      const bool capped = row.has_exact == 0 && s == DSMC_OK;
      if (capped && !first_capped) first_capped = std::to_string(m) + "x" + std::to_string(n);
      std::cout << row.m << ',' << row.n << ',' << sig7(row.focus_density) << ',' << sig7(row.kappa_hat) << ','
                << sig7(row.draws_per_trial) << ',' << row.trials << ',' << sig7(row.mc_ms) << ','
                << (row.has_exact ? sig7(row.exact_ms) : std::string(s == DSMC_OK ? "capped" : "")) << ','
                << sig7(row.mc_value) << ',' << (row.has_exact ? sig7(row.exact_value) : "") << ','
                << (row.has_exact ? sig7(row.abs_error) : "") << ',' << csv_field(row.note) << '\n';
      std::cout.flush();
    }
  }
  double exponent = 0.0;
  if (rows.size() >= 2 && dsmc_fit_scaling(rows.data(), rows.size(), &exponent) == DSMC_OK) {
    std::cout << "# mc_time_exponent," << sig7(exponent) << '\n';
  } else {
    std::cout << "# mc_time_exponent,\n";
  }
  std::cout << "# first_capped_cell," << first_capped.value_or("none") << '\n';
  return worst;
}

struct GenerateFlags {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> weights{0.1, 0.9};
  double density = 0.5;
  std::uint64_t seed = 0;
  std::optional<double> target_conflict;
  std::string output;
};

int cmd_generate(const GenerateFlags& g) {
  dsmc_generate_options o;
  dsmc_generate_options_default(&o);
  o.sources = g.m;
  o.frame_size = g.n;
  o.weight_lo = g.weights.at(0);
  o.weight_hi = g.weights.at(1);
  o.focus_density = g.density;
  o.seed = g.seed;
  o.target_conflict = g.target_conflict.value_or(-1.0);
  dsmc_problem* raw = nullptr;
  double kappa = 0.0;
  double density = 0.0;
  check(dsmc_generate(&o, &raw, &kappa, &density));
  const ProblemPtr p(raw);
  char* text_raw = nullptr;
  check(dsmc_problem_render(p.get(), &text_raw));
  const std::unique_ptr<char, StringDeleter> text(text_raw);

  std::ostringstream out;
  out << "# generated: m=" << g.m << " n=" << g.n << " seed=" << g.seed << " focus_density=" << sig7(density)
      << " kappa_hat=" << sig7(kappa) << '\n'
      << text.get();
  if (g.output.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream file(g.output, std::ios::binary);
    if (!(file << out.str())) input_error("cannot write " + g.output);
    std::cerr << "wrote " << g.output << " (kappa_hat " << sig7(kappa) << ")\n";
  }
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  dsmc_problem* raw = nullptr;
  check(dsmc_problem_load(path.c_str(), 0, &raw));
  const ProblemPtr p(raw);
  const std::size_t k = dsmc_problem_violation_count(p.get());
  for (std::size_t i = 0; i < k; ++i) std::cerr << "invalid: " << dsmc_problem_violation(p.get(), i) << '\n';
  if (k > 0) return kExitInput;
  std::cout << "ok: " << (dsmc_problem_is_logic(p.get()) ? "logic" : "set") << " problem, "
            << dsmc_problem_source_count(p.get()) << " sources, " << dsmc_problem_frame_size(p.get())
            << (dsmc_problem_is_logic(p.get()) ? " atoms\n" : " elements\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo and exact belief computation for Dempster-Shafer evidence"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dsmc_version());
  app.footer(
      "Exit codes: 0 ok, 2 input error, 3 excessive or total conflict, 4 resource cap.\n"
      "Bench CSV columns (fixed order): " +
      std::string(kBenchColumns) +
      "\n  exact_ms is \"capped\" when the exact run hit a cap; exact_value and abs_error are then empty.\n"
      "  Trailing lines: '# mc_time_exponent,<slope of log mc_ms on log(m n)>' and\n"
      "  '# first_capped_cell,<m>x<n>|none'. Numbers carry 7 significant digits.");

  SamplingFlags est;
  auto* estimate = app.add_subcommand("estimate", "Monte-Carlo belief of each query");
  add_problem_flags(estimate, est);
  add_sampling_flags(estimate, est);
  estimate->add_option("--query", est.queries, "Set expression ({a b}, {}, *) or clause (p | !q); repeatable");
  estimate->add_option("--budget", est.budget, "Step budget per trial (logic only)")->check(CLI::PositiveNumber);

  SamplingFlags exf;
  ExactFlags exo;
  auto* exact = app.add_subcommand("exact", "Exact belief and plausibility of each query");
  add_problem_flags(exact, exf);
  exact->add_option("--query", exf.queries, "Set expression or clause; repeatable");
  add_exact_flags(exact, exo);
  exact->add_option("--workers", exo.workers, "Worker threads (enumerate)")->check(CLI::PositiveNumber);

  SamplingFlags cf;
  ExactFlags co;
  bool conflict_exact = false;
  std::size_t top = 0;
  auto* conflict = app.add_subcommand("conflict", "Conflict estimate and most frequent intersections");
  add_problem_flags(conflict, cf);
  add_sampling_flags(conflict, cf);
  conflict->add_flag("--exact", conflict_exact, "Also compute the exact conflict by enumeration");
  conflict->add_option("--max-outcomes", co.max_outcomes, "Joint outcome cap for --exact");
  conflict->add_option("--top", top, "Report the K most frequent intersections");

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "Timing grid of Monte-Carlo against exact combination (CSV)");
  bench->add_option("--m-values", bf.ms, "Source counts")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--n-values", bf.ns, "Frame sizes")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--trials", bf.trials, "Trials per cell")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bf.seed, "Seed (default 0)");
  bench->add_option("--reps", bf.reps, "Timed repetitions per cell; the median is kept")
      ->check(CLI::PositiveNumber);
  bench->add_option("--workers", bf.workers, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--target-conflict", bf.target_conflict, "Tune focus density toward this conflict")
      ->check(CLI::Range(0.0, 1.0));
  bench->add_flag("--fixed-density", bf.fixed_density, "Use --density as given instead of tuning");
  bench->add_option("--density", bf.density, "Focus density");
  bench->add_option("--weights", bf.weights, "Weight range lo,hi")->delimiter(',')->expected(2);
  bench->add_option("--exact-timeout", bf.exact_timeout, "Seconds allowed per exact run");
  bench->add_option("--max-focal", bf.max_focal, "Focal-set cap per exact combine step");
  bench->add_flag("--whole-frame", bf.whole_frame, "Query the whole frame instead of its first half");
  bench->add_flag("--fast-path", bf.fast_path, "Use the simple-support fast path");

  GenerateFlags gf;
  auto* generate = app.add_subcommand("generate", "Random simple-support problem");
  generate->add_option("--m", gf.m, "Sources")->required()->check(CLI::PositiveNumber);
  generate->add_option("--n", gf.n, "Frame size")->required()->check(CLI::PositiveNumber);
  generate->add_option("--weights", gf.weights, "Weight range lo,hi")->delimiter(',')->expected(2);
  generate->add_option("--density", gf.density, "Focus density");
  generate->add_option("--seed", gf.seed, "Seed (default 0)");
  generate->add_option("--target-conflict", gf.target_conflict, "Tune focus density toward this conflict")
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--output,-o", gf.output, "Write here instead of standard output");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a problem file and list every violation");
  validate->add_option("--problem", validate_path, "Problem file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*estimate) return cmd_estimate(est);
    if (*exact) return cmd_exact(exf, exo);
    if (*conflict) return cmd_conflict(cf, conflict_exact, top, co);
    if (*bench) return cmd_bench(bf);
    if (*generate) return cmd_generate(gf);
    if (*validate) return cmd_validate(validate_path);
  } catch (const CallFailed& f) {
    return f.exit_code;
  }
  return kExitInput;
}
