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
#include <string>
#include <string_view>
#include <variant>

#include "dsmc/error.hpp"
#include "dsmc/evidence.hpp"
#include "dsmc/logic.hpp"

namespace dsmc {

/// Current version of the problem text format.
inline constexpr int kFormatVersion = 1;

/// Syntax error with a 1-based source position.
class ParseError : public InvalidInput {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A parsed problem file: either a set-based or a logic problem.
struct ProblemFile {
  std::variant<EvidenceProblem, LogicProblem> problem;
  int version = kFormatVersion;

  bool is_logic() const noexcept { return problem.index() == 1; }
  const EvidenceProblem& set_problem() const { return std::get<EvidenceProblem>(problem); }
  const LogicProblem& logic_problem() const { return std::get<LogicProblem>(problem); }
};

/// Parses the line-oriented problem format:
///
///     # comment
///     version: 1              (optional)
///     frame: x1 x2 x3
///     source:
///       0.6 {x1}
///       0.4 *                 (* is the whole frame)
///
/// Logic problems declare `atoms: p q` instead of `frame:` and write outcome
/// targets as `[p !q]`, `!` marking negation. With `validate` the parsed
/// problem is also checked and every violation reported as InvalidInput.
ProblemFile parse_problem(std::string_view text, bool validate = true);

/// Reads and parses a file. Throws InvalidInput if it cannot be read.
ProblemFile load_problem(const std::string& path, bool validate = true);

/// Canonical text for a problem; parse_problem(render_problem(p)) == p.
std::string render_problem(const EvidenceProblem& p);
std::string render_problem(const LogicProblem& p);
std::string render_problem(const ProblemFile& f);

/// `*` (whole frame), `{}` or `{a b c}`; commas may separate labels.
FocalSet parse_set_expr(const Frame& frame, std::string_view text);
std::string render_set(const Frame& frame, const FocalSet& s);

/// Literal list such as `[p !q]`.
TermSet parse_terms(const LogicProblem& p, std::string_view text);
std::string render_terms(const LogicProblem& p, const TermSet& t);

/// Disjunction such as `p | !q`, optionally in parentheses.
ClauseQuery parse_clause(const LogicProblem& p, std::string_view text);
std::string render_clause(const LogicProblem& p, const ClauseQuery& c);

}  // namespace dsmc
