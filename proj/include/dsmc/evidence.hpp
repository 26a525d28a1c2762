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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dsmc/focal_set.hpp"

namespace dsmc {

/// Tolerance on the sum of input probabilities / masses.
inline constexpr double kNormalizationTolerance = 1e-9;
/// Masses below this after arithmetic are dropped and the rest renormalized.
inline constexpr double kMassDust = 1e-12;

/// The frame of discernment: an ordered list of distinct element labels.
class Frame {
 public:
  /// Throws InvalidInput on an empty list, an empty label or a duplicate.
  static std::shared_ptr<const Frame> make(std::vector<std::string> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t j) const { return labels_.at(j); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<std::size_t> index_of(std::string_view label) const;

  FocalSet empty_set() const { return FocalSet(size()); }
  FocalSet full_set() const { return FocalSet::full(size()); }

  /// Set from labels; throws InvalidInput on an unknown label.
  FocalSet set_of(std::span<const std::string> labels) const;
  FocalSet set_of(std::initializer_list<std::string_view> labels) const;

  friend bool operator==(const Frame& a, const Frame& b) { return a.labels_ == b.labels_; }

 private:
  explicit Frame(std::vector<std::string> labels);

  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

using FramePtr = std::shared_ptr<const Frame>;

/// True when both pointers name the same frame (by identity or by labels).
bool same_frame(const FramePtr& a, const FramePtr& b);

/// Normalized mass function: focal sets with strictly positive mass summing to 1.
class MassFunction {
 public:
  using Entries = std::unordered_map<FocalSet, double>;

  /// Builds a normalized mass function. Entries for equal sets are merged.
  /// Throws InvalidInput if a set is empty, a mass is not positive, a set has
  /// the wrong width, or the masses do not sum to 1 within 1e-9. The result
  /// is renormalized exactly and stripped of dust.
  static MassFunction make(FramePtr frame,
                           std::span<const std::pair<FocalSet, double>> entries);
  static MassFunction make(FramePtr frame,
                           std::initializer_list<std::pair<FocalSet, double>> entries);

  /// The vacuous mass function {Θ: 1}.
  static MassFunction vacuous(FramePtr frame);

  const FramePtr& frame() const noexcept { return frame_; }
  const Entries& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Mass of `a`; 0 if `a` is not focal.
  double mass(const FocalSet& a) const;

  /// Entries ordered by focal set, for stable output.
  std::vector<std::pair<FocalSet, double>> sorted() const;

 private:
  friend class MassBuilder;
  MassFunction(FramePtr frame, Entries entries)
      : frame_(std::move(frame)), entries_(std::move(entries)) {}

  FramePtr frame_;
  Entries entries_;
};

/// Internal assembler used by the combiners: accumulates raw, possibly
/// unnormalized mass and emits a normalized MassFunction.
class MassBuilder {
 public:
  explicit MassBuilder(FramePtr frame) : frame_(std::move(frame)) {}

  void reserve(std::size_t n) { entries_.reserve(n); }
  void add(const FocalSet& a, double mass) { entries_[a] += mass; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Drops dust, divides by the remaining total and returns the result.
  /// Throws TotalConflict if nothing positive remains.
  MassFunction finish() &&;

 private:
  FramePtr frame_;
  MassFunction::Entries entries_;
};

/// One possible outcome of a source: its probability and the set it implies.
struct Outcome {
  double probability = 0.0;
  FocalSet target;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// One evidence source: a finite outcome space with probabilities and a
/// compatibility target per outcome. Outcomes may share a target.
class SourceModel {
 public:
  SourceModel(FramePtr frame, std::vector<Outcome> outcomes)
      : frame_(std::move(frame)), outcomes_(std::move(outcomes)) {}

  const FramePtr& frame() const noexcept { return frame_; }
  const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
  std::size_t size() const noexcept { return outcomes_.size(); }

  friend bool operator==(const SourceModel& a, const SourceModel& b) {
    return same_frame(a.frame_, b.frame_) && a.outcomes_ == b.outcomes_;
  }

 private:
  FramePtr frame_;
  std::vector<Outcome> outcomes_;
};

/// A simple support function: weight s on `focus`, 1-s on the whole frame.
struct SimpleSupport {
  FocalSet focus;
  double weight = 1.0;

  /// {(s, focus), (1-s, Θ)}, or the single outcome (1, focus) when s = 1.
  SourceModel to_source(const FramePtr& frame) const;
};

/// Recognizes a source of simple-support shape: one outcome, or two
/// outcomes of which at least one targets the whole frame. Returns the index
/// of the focus outcome.
std::optional<std::size_t> simple_support_focus(const SourceModel& source);

/// A frame plus an ordered list of independent sources.
class EvidenceProblem {
 public:
  EvidenceProblem(FramePtr frame, std::vector<SourceModel> sources)
      : frame_(std::move(frame)), sources_(std::move(sources)) {}

  const FramePtr& frame() const noexcept { return frame_; }
  const std::vector<SourceModel>& sources() const noexcept { return sources_; }
  std::size_t size() const noexcept { return sources_.size(); }

  friend bool operator==(const EvidenceProblem& a, const EvidenceProblem& b) {
    return same_frame(a.frame_, b.frame_) && a.sources_ == b.sources_;
  }

 private:
  FramePtr frame_;
  std::vector<SourceModel> sources_;
};

/// Lists every broken invariant of `p`; empty means valid. Messages name the
/// offending source and outcome, e.g. "source 0: probabilities sum to 1.1".
std::vector<std::string> validate_problem(const EvidenceProblem& p);

/// Throws InvalidInput carrying every violation (one per line) unless `p` is valid.
void require_valid(const EvidenceProblem& p);

/// Bel(b) = sum of m(a) over focal a contained in b.
double bel_from_mass(const MassFunction& m, const FocalSet& b);

/// Pl(b) = sum of m(a) over focal a meeting b.
double pl_from_mass(const MassFunction& m, const FocalSet& b);

/// Induced mass function of a source; outcomes sharing a target are summed.
MassFunction mass_from_source(const SourceModel& s);

/// Largest frame accepted by the subset-table routines below.
inline constexpr std::size_t kMaxTableFrame = 24;

/// Bel over all 2^n subsets, indexed by the subset's bitmask value.
std::vector<double> bel_table(const MassFunction& m);

/// Naive Möbius inversion of a full belief table (index = subset bitmask).
/// Throws ResourceLimit for n > 24 and InvalidInput if the table is not a
/// belief function (some recovered mass below -1e-9, or Bel(Θ) != 1).
MassFunction mass_from_bel(const FramePtr& frame, std::span<const double> bel);

}  // namespace dsmc
