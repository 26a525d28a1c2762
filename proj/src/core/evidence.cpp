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

#include "dsmc/evidence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "dsmc/error.hpp"
#include "numfmt.hpp"

namespace dsmc {

using detail::format_short;

// ---------------------------------------------------------------------------
// Frame

Frame::Frame(std::vector<std::string> labels) : labels_(std::move(labels)) {
  index_.reserve(labels_.size());
  for (std::size_t j = 0; j < labels_.size(); ++j) index_.emplace(labels_[j], j);
}

std::shared_ptr<const Frame> Frame::make(std::vector<std::string> labels) {
  if (labels.empty()) throw InvalidInput("frame must have at least one element");
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j].empty()) throw InvalidInput("frame element " + std::to_string(j) + " has an empty label");
    if (!seen.emplace(labels[j], j).second) {
      throw InvalidInput("duplicate frame element '" + labels[j] + "'");
    }
  }
  return std::shared_ptr<const Frame>(new Frame(std::move(labels)));
}

std::optional<std::size_t> Frame::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FocalSet Frame::set_of(std::span<const std::string> labels) const {
  FocalSet s(size());
  for (const auto& l : labels) {
    auto j = index_of(l);
    if (!j) throw InvalidInput("unknown frame element '" + l + "'");
    s.insert(*j);
  }
  return s;
}

FocalSet Frame::set_of(std::initializer_list<std::string_view> labels) const {
  std::vector<std::string> v(labels.begin(), labels.end());
  return set_of(std::span<const std::string>(v));
}

bool same_frame(const FramePtr& a, const FramePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

// ---------------------------------------------------------------------------
// MassFunction

MassFunction MassFunction::make(FramePtr frame,
                                std::initializer_list<std::pair<FocalSet, double>> entries) {
  return make(std::move(frame),
              std::span<const std::pair<FocalSet, double>>(entries.begin(), entries.size()));
}

MassFunction MassFunction::make(FramePtr frame,
                                std::span<const std::pair<FocalSet, double>> entries) {
  if (!frame) throw InvalidInput("mass function needs a frame");
  double total = 0.0;
  MassBuilder builder(frame);
  for (const auto& [set, mass] : entries) {
    if (set.universe() != frame->size()) {
      throw FrameMismatch("focal set of width " + std::to_string(set.universe()) +
                          " on a frame of size " + std::to_string(frame->size()));
    }
    if (set.empty()) throw InvalidInput("mass assigned to the empty set");
    if (!(mass > 0.0) || !std::isfinite(mass)) {
      throw InvalidInput("mass " + format_short(mass) + " is not positive");
    }
    total += mass;
    builder.add(set, mass);
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw InvalidInput("masses sum to " + format_short(total));
  }
  return std::move(builder).finish();
}

MassFunction MassFunction::vacuous(FramePtr frame) {
  Entries e;
  e.emplace(frame->full_set(), 1.0);
  return MassFunction(std::move(frame), std::move(e));
}

double MassFunction::mass(const FocalSet& a) const {
  auto it = entries_.find(a);
  return it == entries_.end() ? 0.0 : it->second;
}

std::vector<std::pair<FocalSet, double>> MassFunction::sorted() const {
  std::vector<std::pair<FocalSet, double>> out(entries_.begin(), entries_.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

MassFunction MassBuilder::finish() && {
  double total = 0.0;
  for (const auto& [set, mass] : entries_) total += mass;
  if (!(total > 0.0)) throw TotalConflict("no mass left to normalize");

  // Normalize, drop dust, renormalize whatever survived.
  double kept = 0.0;
  for (auto it = entries_.begin(); it != entries_.end();) {
    it->second /= total;
    if (it->second < kMassDust) {
      it = entries_.erase(it);
    } else {
      kept += it->second;
      ++it;
    }
  }
  if (entries_.empty()) throw TotalConflict("every focal set fell below the dust threshold");
  if (kept != 1.0) {
    for (auto& [set, mass] : entries_) mass /= kept;
  }
  return MassFunction(std::move(frame_), std::move(entries_));
}

// ---------------------------------------------------------------------------
// Sources

SourceModel SimpleSupport::to_source(const FramePtr& frame) const {
  if (weight >= 1.0) return SourceModel(frame, {{1.0, focus}});
  return SourceModel(frame, {{weight, focus}, {1.0 - weight, frame->full_set()}});
}

std::optional<std::size_t> simple_support_focus(const SourceModel& source) {
  const auto& out = source.outcomes();
  if (out.size() == 1) return 0;
  if (out.size() != 2) return std::nullopt;
  if (out[1].target.is_full()) return 0;
  if (out[0].target.is_full()) return 1;
  return std::nullopt;
}

std::vector<std::string> validate_problem(const EvidenceProblem& p) {
  std::vector<std::string> report;
  if (!p.frame()) {
    report.emplace_back("problem has no frame");
    return report;
  }
  if (p.sources().empty()) report.emplace_back("problem has no sources");
  const std::size_t n = p.frame()->size();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const SourceModel& s = p.sources()[i];
    const std::string src = "source " + std::to_string(i);
    if (!same_frame(s.frame(), p.frame())) report.push_back(src + ": frame differs from the problem frame");
    if (s.outcomes().empty()) {
      report.push_back(src + ": no outcomes");
      continue;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Outcome& o = s.outcomes()[k];
      const std::string where = src + " outcome " + std::to_string(k);
      if (!(o.probability > 0.0) || !std::isfinite(o.probability)) {
        report.push_back(where + ": probability " + format_short(o.probability) + " is not positive");
      }
      if (o.target.universe() != n) {
        report.push_back(where + ": target width " + std::to_string(o.target.universe()) +
                         " does not match frame size " + std::to_string(n));
      } else if (o.target.empty()) {
        report.push_back(where + ": empty target");
      }
      total += o.probability;
    }
    if (!(std::abs(total - 1.0) <= kNormalizationTolerance)) {
      report.push_back(src + ": probabilities sum to " + format_short(total));
    }
  }
  return report;
}

void require_valid(const EvidenceProblem& p) {
  auto report = validate_problem(p);
  if (report.empty()) return;
  std::string msg;
  for (const auto& line : report) {
    if (!msg.empty()) msg += '\n';
    msg += line;
  }
  throw InvalidInput(msg);
}

// ---------------------------------------------------------------------------
// Belief, plausibility, Möbius

namespace {

void check_query(const MassFunction& m, const FocalSet& b) {
  if (b.universe() != m.frame()->size()) {
    throw FrameMismatch("query of width " + std::to_string(b.universe()) +
                        " on a frame of size " + std::to_string(m.frame()->size()));
  }
}

void check_table_frame(std::size_t n) {
  if (n > kMaxTableFrame) {
    throw ResourceLimit("subset tables are limited to frames of " + std::to_string(kMaxTableFrame) +
                        " elements; frame has " + std::to_string(n));
  }
}

}  // namespace

double bel_from_mass(const MassFunction& m, const FocalSet& b) {
  check_query(m, b);
  double bel = 0.0;
  for (const auto& [a, mass] : m.entries()) {
    if (a.is_subset_of(b)) bel += mass;
  }
  return std::clamp(bel, 0.0, 1.0);
}

double pl_from_mass(const MassFunction& m, const FocalSet& b) {
  check_query(m, b);
  double pl = 0.0;
  for (const auto& [a, mass] : m.entries()) {
    if (a.intersects(b)) pl += mass;
  }
  return std::clamp(pl, 0.0, 1.0);
}

MassFunction mass_from_source(const SourceModel& s) {
  std::vector<std::pair<FocalSet, double>> entries;
  entries.reserve(s.size());
  for (const Outcome& o : s.outcomes()) entries.emplace_back(o.target, o.probability);
  return MassFunction::make(s.frame(), entries);
}

std::vector<double> bel_table(const MassFunction& m) {
  const std::size_t n = m.frame()->size();
  check_table_frame(n);
  std::vector<double> table(std::size_t{1} << n, 0.0);
  for (const auto& [a, mass] : m.entries()) table[a.words()[0]] += mass;
  // Subset-sum (zeta) transform over each element.
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t mask = 0; mask < table.size(); ++mask) {
      if (mask & bit) table[mask] += table[mask ^ bit];
    }
  }
  return table;
}

MassFunction mass_from_bel(const FramePtr& frame, std::span<const double> bel) {
  const std::size_t n = frame->size();
  check_table_frame(n);
  const std::size_t size = std::size_t{1} << n;
  if (bel.size() != size) {
    throw InvalidInput("belief table has " + std::to_string(bel.size()) + " entries; expected " +
                       std::to_string(size));
  }
  if (std::abs(bel[0]) > kNormalizationTolerance) {
    throw InvalidInput("not a belief function: Bel(empty) = " + format_short(bel[0]));
  }

  std::vector<std::pair<FocalSet, double>> entries;
  for (std::size_t a = 1; a < size; ++a) {
    const int a_bits = std::popcount(a);
    double m = 0.0;
    // Every submask c of a, including a itself and the empty set.
    for (std::size_t c = a;; c = (c - 1) & a) {
      const int diff = a_bits - std::popcount(c);
      m += (diff % 2 == 0) ? bel[c] : -bel[c];
      if (c == 0) break;
    }
    if (m < -kNormalizationTolerance) {
      throw InvalidInput("not a belief function: recovered mass " + format_short(m) +
                         " for subset index " + std::to_string(a));
    }
    if (m >= kMassDust) {
      FocalSet s(n);
      for (std::size_t j = 0; j < n; ++j) {
        if (a & (std::size_t{1} << j)) s.insert(j);
      }
      entries.emplace_back(std::move(s), m);
    }
  }
  return MassFunction::make(frame, entries);
}

}  // namespace dsmc
