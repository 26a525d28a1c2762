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

#include "dsmc/dsmc.h"

#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "dsmc/bench.hpp"
#include "dsmc/error.hpp"
#include "dsmc/exact.hpp"
#include "dsmc/logic.hpp"
#include "dsmc/mc.hpp"
#include "dsmc/problem_io.hpp"

struct dsmc_problem {
  dsmc::ProblemFile file;
  std::vector<std::string> violations;
};

struct dsmc_set_list {
  struct Entry {
    std::string set;
    double value;
    std::uint64_t count;
  };
  std::vector<Entry> entries;
};

namespace {

thread_local std::string g_last_error;
thread_local double g_last_kappa = 0.0;

dsmc_status fail(dsmc_status status, const char* what) {
  g_last_error = what;
  return status;
}

// Runs `body`, mapping library exceptions onto status codes.
template <class Body>
dsmc_status guarded(Body&& body) {
  g_last_error.clear();
  try {
    body();
    return DSMC_OK;
  } catch (const dsmc::ExcessiveConflict& e) {
    g_last_kappa = e.kappa_hat();
    return fail(DSMC_ERR_CONFLICT, e.what());
  } catch (const dsmc::TotalConflict& e) {
    g_last_kappa = 1.0;
    return fail(DSMC_ERR_CONFLICT, e.what());
  } catch (const dsmc::ResourceLimit& e) {
    return fail(DSMC_ERR_RESOURCE, e.what());
  } catch (const dsmc::ContractViolation& e) {
    return fail(DSMC_ERR_CONTRACT, e.what());
  } catch (const dsmc::InvalidInput& e) {
    return fail(DSMC_ERR_INPUT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DSMC_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return fail(DSMC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DSMC_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw dsmc::InvalidInput(what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

dsmc_problem* wrap(dsmc::ProblemFile file, bool validated) {
  auto p = std::make_unique<dsmc_problem>(dsmc_problem{std::move(file), {}});
  if (!validated) {
    p->violations = p->file.is_logic() ? dsmc::validate_logic_problem(p->file.logic_problem())
                                       : dsmc::validate_problem(p->file.set_problem());
  }
  return p.release();
}

const dsmc::EvidenceProblem& set_problem(const dsmc_problem* p) {
  require(p != nullptr, "null problem");
  if (p->file.is_logic()) throw dsmc::InvalidInput("operation needs a set-based problem; got a logic problem");
  return p->file.set_problem();
}

const dsmc::LogicProblem& logic_problem(const dsmc_problem* p) {
  require(p != nullptr, "null problem");
  if (!p->file.is_logic()) throw dsmc::InvalidInput("operation needs a logic problem; got a set-based problem");
  return p->file.logic_problem();
}

dsmc::TrialEngineConfig to_config(const dsmc_config* cfg) {
  dsmc::TrialEngineConfig c;
  if (cfg != nullptr) {
    c.trials = cfg->trials;
    c.seed = cfg->seed;
    c.restart_cap = cfg->restart_cap;
    c.workers = cfg->workers;
    c.simple_support_path = cfg->simple_support_path != 0;
  }
  return c;
}

dsmc_exact_options exact_defaults() {
  dsmc_exact_options o;
  dsmc_exact_options_default(&o);
  return o;
}

dsmc::CombineLimits to_combine_limits(const dsmc_exact_options& o) {
  dsmc::CombineLimits l;
  l.max_focal_sets = o.max_focal_sets;
  if (o.time_limit_seconds > 0) {
    l.time_limit = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(o.time_limit_seconds));
  }
  return l;
}

dsmc::EnumerationLimits to_enum_limits(const dsmc_exact_options& o) {
  return {o.max_outcomes, o.workers == 0 ? 1u : o.workers};
}

// The set-based view of a problem, translating logic problems.
struct SetView {
  dsmc::EvidenceProblem problem;
  const dsmc::LogicProblem* logic = nullptr;

  dsmc::FocalSet query(const char* text) const {
    require(text != nullptr, "null query");
    if (logic != nullptr) return dsmc::satisfying_set(logic->atoms().size(), dsmc::parse_clause(*logic, text));
    return dsmc::parse_set_expr(*problem.frame(), text);
  }
};

SetView set_view(const dsmc_problem* p) {
  require(p != nullptr, "null problem");
  if (p->file.is_logic()) {
    return {dsmc::translate_to_set_problem(p->file.logic_problem()), &p->file.logic_problem()};
  }
  return {p->file.set_problem(), nullptr};
}

}  // namespace

extern "C" {

const char* dsmc_version(void) { return "0.1.0"; }
const char* dsmc_last_error(void) { return g_last_error.c_str(); }
double dsmc_last_conflict_estimate(void) { return g_last_kappa; }
void dsmc_string_free(char* s) { std::free(s); }

dsmc_status dsmc_problem_parse(const char* text, int validate, dsmc_problem** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = wrap(dsmc::parse_problem(text, validate != 0), validate != 0);
  });
}

dsmc_status dsmc_problem_load(const char* path, int validate, dsmc_problem** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = wrap(dsmc::load_problem(path, validate != 0), validate != 0);
  });
}

void dsmc_problem_free(dsmc_problem* p) { delete p; }

int dsmc_problem_is_logic(const dsmc_problem* p) { return p != nullptr && p->file.is_logic() ? 1 : 0; }

size_t dsmc_problem_source_count(const dsmc_problem* p) {
  if (p == nullptr) return 0;
  return p->file.is_logic() ? p->file.logic_problem().sources().size() : p->file.set_problem().size();
}

size_t dsmc_problem_frame_size(const dsmc_problem* p) {
  if (p == nullptr) return 0;
  return p->file.is_logic() ? p->file.logic_problem().atoms().size()
                            : p->file.set_problem().frame()->size();
}

dsmc_status dsmc_problem_render(const dsmc_problem* p, char** out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "null argument");
    *out = copy_string(dsmc::render_problem(p->file));
  });
}

size_t dsmc_problem_violation_count(const dsmc_problem* p) { return p == nullptr ? 0 : p->violations.size(); }

const char* dsmc_problem_violation(const dsmc_problem* p, size_t i) {
  if (p == nullptr || i >= p->violations.size()) return nullptr;
  return p->violations[i].c_str();
}

void dsmc_config_default(dsmc_config* cfg) {
  if (cfg == nullptr) return;
  const dsmc::TrialEngineConfig c;
  cfg->trials = c.trials;
  cfg->seed = c.seed;
  cfg->restart_cap = c.restart_cap;
  cfg->workers = c.workers;
  cfg->simple_support_path = 0;
}

dsmc_status dsmc_plan_trials(double accuracy, uint64_t* trials) {
  return guarded([&] {
    require(trials != nullptr, "null argument");
    *trials = dsmc::plan_trials(accuracy);
  });
}

dsmc_status dsmc_estimate_queries(const dsmc_problem* p, const char* const* queries, size_t count,
                                  const dsmc_config* cfg, dsmc_estimate* out) {
  return guarded([&] {
    require(queries != nullptr && out != nullptr, "null argument");
    const dsmc::EvidenceProblem& problem = set_problem(p);
    dsmc::QueryBatch batch;
    for (size_t q = 0; q < count; ++q) {
      require(queries[q] != nullptr, "null query");
      batch.push_back(dsmc::parse_set_expr(*problem.frame(), queries[q]));
    }
    const auto estimates = dsmc::estimate(problem, batch, to_config(cfg));
    for (size_t q = 0; q < count; ++q) {
      const dsmc::Estimate& e = estimates[q];
      out[q] = {e.value, e.trials, e.successes, e.restarts, e.sd_bound,
                e.plugin_sd, e.conflict_estimate, e.lower, e.upper};
    }
  });
}

dsmc_status dsmc_logic_estimate(const dsmc_problem* p, const char* clause, const dsmc_config* cfg,
                                uint64_t step_budget, dsmc_bounded_estimate* out) {
  return guarded([&] {
    require(clause != nullptr && out != nullptr, "null argument");
    const dsmc::LogicProblem& problem = logic_problem(p);
    const auto e = dsmc::logic_estimate(problem, dsmc::parse_clause(problem, clause), to_config(cfg),
                                        step_budget == 0 ? dsmc::kUnlimitedBudget : step_budget);
    *out = {e.lower, e.upper, e.trials, e.successes, e.timeouts, e.restarts, e.sd_bound, e.conflict_estimate};
  });
}

dsmc_status dsmc_conflict_estimate(const dsmc_problem* p, const dsmc_config* cfg, double* kappa_hat,
                                   double* expected_loops) {
  return guarded([&] {
    require(kappa_hat != nullptr && expected_loops != nullptr, "null argument");
    const auto c = dsmc::conflict_estimate(set_problem(p), to_config(cfg));
    *kappa_hat = c.kappa_hat;
    *expected_loops = c.expected_loops;
  });
}

dsmc_status dsmc_subset_scan(const dsmc_problem* p, const dsmc_config* cfg, size_t max_report,
                             dsmc_set_list** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const dsmc::EvidenceProblem& problem = set_problem(p);
    auto list = std::make_unique<dsmc_set_list>();
    for (const auto& f : dsmc::subset_frequency_scan(problem, to_config(cfg), max_report)) {
      list->entries.push_back({dsmc::render_set(*problem.frame(), f.set), f.frequency, f.count});
    }
    *out = list.release();
  });
}

void dsmc_exact_options_default(dsmc_exact_options* opts) {
  if (opts == nullptr) return;
  const dsmc::CombineLimits cl;
  const dsmc::EnumerationLimits el;
  opts->method = DSMC_EXACT_MASS;
  opts->max_focal_sets = cl.max_focal_sets;
  opts->time_limit_seconds = 0.0;
  opts->max_outcomes = el.max_outcomes;
  opts->workers = el.workers;
}

dsmc_status dsmc_exact_queries(const dsmc_problem* p, const char* const* queries, size_t count,
                               const dsmc_exact_options* opts, dsmc_exact_result* out) {
  return guarded([&] {
    require(queries != nullptr && out != nullptr, "null argument");
    const dsmc_exact_options o = opts != nullptr ? *opts : exact_defaults();
    const SetView view = set_view(p);
    std::vector<dsmc::FocalSet> sets;
    for (size_t q = 0; q < count; ++q) sets.push_back(view.query(queries[q]));

    if (o.method == DSMC_EXACT_MASS) {
      const dsmc::CombinationResult r = dsmc::combine_all(view.problem, to_combine_limits(o));
      for (size_t q = 0; q < count; ++q) {
        out[q] = {dsmc::bel_from_mass(r.combined, sets[q]), dsmc::pl_from_mass(r.combined, sets[q]),
                  r.conflict};
      }
      return;
    }
    const auto limits = to_enum_limits(o);
    for (size_t q = 0; q < count; ++q) {
      const auto bel = dsmc::exact_belief_enumeration(view.problem, sets[q], limits);
      const auto dual = dsmc::exact_belief_enumeration(view.problem, sets[q].complement(), limits);
      out[q] = {bel.bel, 1.0 - dual.bel, bel.conflict};
    }
  });
}

dsmc_status dsmc_conflict_exact(const dsmc_problem* p, const dsmc_exact_options* opts, double* conflict) {
  return guarded([&] {
    require(conflict != nullptr, "null argument");
    const dsmc_exact_options o = opts != nullptr ? *opts : exact_defaults();
    *conflict = dsmc::conflict_exact(set_view(p).problem, to_enum_limits(o));
  });
}

dsmc_status dsmc_combine(const dsmc_problem* p, const dsmc_exact_options* opts, dsmc_set_list** out,
                         double* conflict) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const dsmc_exact_options o = opts != nullptr ? *opts : exact_defaults();
    const SetView view = set_view(p);
    const dsmc::CombinationResult r = dsmc::combine_all(view.problem, to_combine_limits(o));
    auto list = std::make_unique<dsmc_set_list>();
    for (const auto& [set, mass] : r.combined.sorted()) {
      list->entries.push_back({dsmc::render_set(*view.problem.frame(), set), mass, 0});
    }
    if (conflict != nullptr) *conflict = r.conflict;
    *out = list.release();
  });
}

size_t dsmc_set_list_size(const dsmc_set_list* l) { return l == nullptr ? 0 : l->entries.size(); }

const char* dsmc_set_list_set(const dsmc_set_list* l, size_t i) {
  return l == nullptr || i >= l->entries.size() ? nullptr : l->entries[i].set.c_str();
}

double dsmc_set_list_value(const dsmc_set_list* l, size_t i) {
  return l == nullptr || i >= l->entries.size() ? 0.0 : l->entries[i].value;
}

uint64_t dsmc_set_list_count(const dsmc_set_list* l, size_t i) {
  return l == nullptr || i >= l->entries.size() ? 0 : l->entries[i].count;
}

void dsmc_set_list_free(dsmc_set_list* l) { delete l; }

void dsmc_generate_options_default(dsmc_generate_options* opts) {
  if (opts == nullptr) return;
  const dsmc::GeneratorSpec s;
  opts->sources = s.sources;
  opts->frame_size = s.frame_size;
  opts->weight_lo = s.weight_lo;
  opts->weight_hi = s.weight_hi;
  opts->focus_density = s.focus_density;
  opts->seed = s.seed;
  opts->target_conflict = -1.0;
  opts->conflict_trials = s.conflict_trials;
}

dsmc_status dsmc_generate(const dsmc_generate_options* opts, dsmc_problem** out, double* kappa_hat,
                          double* focus_density) {
  return guarded([&] {
    require(opts != nullptr && out != nullptr, "null argument");
    dsmc::GeneratorSpec s;
    s.sources = opts->sources;
    s.frame_size = opts->frame_size;
    s.weight_lo = opts->weight_lo;
    s.weight_hi = opts->weight_hi;
    s.focus_density = opts->focus_density;
    s.seed = opts->seed;
    s.conflict_trials = opts->conflict_trials;
    dsmc::GeneratedProblem g = opts->target_conflict >= 0.0
                                   ? dsmc::generate_for_conflict(s, opts->target_conflict)
                                   : dsmc::generate_problem(s);
    if (kappa_hat != nullptr) *kappa_hat = g.kappa_hat;
    if (focus_density != nullptr) *focus_density = g.focus_density;
    *out = wrap(dsmc::ProblemFile{std::move(g.problem)}, true);
  });
}

void dsmc_bench_options_default(dsmc_bench_options* opts) {
  if (opts == nullptr) return;
  const dsmc::BenchOptions b;
  opts->trials = b.trials;
  opts->seed = b.seed;
  opts->repetitions = b.repetitions;
  opts->workers = b.workers;
  opts->simple_support_path = 0;
  opts->whole_frame_query = 0;
  opts->weight_lo = b.weight_lo;
  opts->weight_hi = b.weight_hi;
  opts->focus_density = b.focus_density;
  opts->target_conflict = b.target_conflict.value_or(-1.0);
  opts->exact_max_focal_sets = b.exact_limits.max_focal_sets;
  opts->exact_time_limit_seconds = std::chrono::duration<double>(*b.exact_limits.time_limit).count();
}

dsmc_status dsmc_bench_cell(const dsmc_bench_options* opts, size_t m, size_t n, dsmc_bench_row* row) {
  return guarded([&] {
    require(opts != nullptr && row != nullptr, "null argument");
    dsmc::BenchOptions b;
    b.trials = opts->trials;
    b.seed = opts->seed;
    b.repetitions = opts->repetitions;
    b.workers = opts->workers;
    b.simple_support_path = opts->simple_support_path != 0;
    b.query = opts->whole_frame_query ? dsmc::BenchQuery::kWholeFrame : dsmc::BenchQuery::kHalfFrame;
    b.weight_lo = opts->weight_lo;
    b.weight_hi = opts->weight_hi;
    b.focus_density = opts->focus_density;
    b.target_conflict = opts->target_conflict >= 0.0 ? std::optional<double>(opts->target_conflict)
                                                     : std::nullopt;
    dsmc_exact_options eo = exact_defaults();
    eo.max_focal_sets = opts->exact_max_focal_sets;
    eo.time_limit_seconds = opts->exact_time_limit_seconds;
    b.exact_limits = to_combine_limits(eo);

    const dsmc::BenchRow r = dsmc::run_bench_cell(m, n, b);
    *row = dsmc_bench_row{};
    row->m = r.m;
    row->n = r.n;
    row->focus_density = r.focus_density;
    row->kappa_hat = r.kappa_hat;
    row->draws_per_trial = r.draws_per_trial;
    row->trials = r.trials;
    row->mc_ms = r.mc_ms;
    row->mc_value = r.mc_value;
    row->has_exact = r.exact_value.has_value() ? 1 : 0;
    row->exact_ms = r.exact_ms.value_or(0.0);
    row->exact_value = r.exact_value.value_or(0.0);
    row->abs_error = r.abs_error.value_or(0.0);
    std::strncpy(row->note, r.note.c_str(), sizeof row->note - 1);
  });
}

dsmc_status dsmc_fit_scaling(const dsmc_bench_row* rows, size_t count, double* exponent) {
  return guarded([&] {
    require(rows != nullptr && exponent != nullptr, "null argument");
    std::vector<dsmc::BenchRow> rs;
    for (size_t i = 0; i < count; ++i) {
      dsmc::BenchRow r;
      r.m = rows[i].m;
      r.n = rows[i].n;
      r.mc_ms = rows[i].mc_ms;
      rs.push_back(r);
    }
    const dsmc::ScalingFit fit = dsmc::fit_scaling(rs);
    if (fit.points < 2) throw dsmc::InvalidInput("scaling fit needs at least two timed rows");
    *exponent = fit.exponent;
  });
}

}  // extern "C"
