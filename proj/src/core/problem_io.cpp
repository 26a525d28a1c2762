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

#include "dsmc/problem_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "numfmt.hpp"

namespace dsmc {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : InvalidInput("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                   message),
      line_(line),
      column_(column) {}

namespace {

// Error raised by the token-level helpers; `offset` is relative to the text
// they were given and gets turned into a line/column by the caller.
struct LocalError {
  std::size_t offset;
  std::string message;
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_label_char(char c) {
  return !is_space(c) && c != '{' && c != '}' && c != '[' && c != ']' && c != '(' && c != ')' &&
         c != ',' && c != '|' && c != '#' && c != '*';
}

std::size_t skip_space(std::string_view s, std::size_t i) {
  while (i < s.size() && is_space(s[i])) ++i;
  return i;
}

// Reads a run of label characters starting at i.
std::string_view read_label(std::string_view s, std::size_t& i) {
  const std::size_t start = i;
  while (i < s.size() && is_label_char(s[i])) ++i;
  return s.substr(start, i - start);
}

// Labels between `open` and `close`, separated by whitespace or commas.
// Returns the labels with their offsets; `end` receives the position after `close`.
std::vector<std::pair<std::string_view, std::size_t>> read_list(std::string_view s, std::size_t i,
                                                                char open, char close,
                                                                std::size_t& end) {
  i = skip_space(s, i);
  if (i >= s.size() || s[i] != open) {
    throw LocalError{i, std::string("expected '") + open + "'"};
  }
  ++i;
  std::vector<std::pair<std::string_view, std::size_t>> items;
  for (;;) {
    i = skip_space(s, i);
    if (i < s.size() && s[i] == ',') {
      ++i;
      continue;
    }
    if (i >= s.size()) throw LocalError{i, std::string("missing '") + close + "'"};
    if (s[i] == close) {
      end = i + 1;
      return items;
    }
    const std::size_t at = i;
    if (s[i] == '!') ++i;  // negation marker, only meaningful for literals
    read_label(s, i);
    if (i == at || (s[at] == '!' && i == at + 1)) {
      throw LocalError{at, std::string("unexpected character '") + s[at] + "'"};
    }
    items.emplace_back(s.substr(at, i - at), at);
  }
}

FocalSet set_expr_at(const Frame& frame, std::string_view s, std::size_t& end) {
  std::size_t i = skip_space(s, 0);
  if (i < s.size() && s[i] == '*') {
    end = i + 1;
    return frame.full_set();
  }
  FocalSet set(frame.size());
  for (auto [label, at] : read_list(s, i, '{', '}', end)) {
    if (label.front() == '!') throw LocalError{at, "negation is not allowed in a set"};
    auto j = frame.index_of(label);
    if (!j) throw LocalError{at, "unknown frame element '" + std::string(label) + "'"};
    set.insert(*j);
  }
  return set;
}

Literal literal_at(const LogicProblem& p, std::string_view token, std::size_t at) {
  const bool negated = token.front() == '!';
  const std::string_view name = negated ? token.substr(1) : token;
  auto a = p.atom_index(name);
  if (!a) throw LocalError{at, "unknown atom '" + std::string(name) + "'"};
  return {*a, !negated};
}

TermSet terms_at(const LogicProblem& p, std::string_view s, std::size_t& end) {
  std::vector<Literal> lits;
  for (auto [token, at] : read_list(s, 0, '[', ']', end)) lits.push_back(literal_at(p, token, at));
  return TermSet(std::move(lits));
}

void expect_end(std::string_view s, std::size_t i) {
  i = skip_space(s, i);
  if (i < s.size()) throw LocalError{i, "unexpected trailing text '" + std::string(s.substr(i)) + "'"};
}

std::optional<double> parse_number(std::string_view token) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::string joined(const std::vector<std::string>& report) {
  std::string msg;
  for (const auto& line : report) {
    if (!msg.empty()) msg += '\n';
    msg += line;
  }
  return msg;
}

// Line-by-line problem parser.
class Parser {
 public:
  ProblemFile run(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view line = text.substr(pos, eol - pos);
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      try {
        handle(line);
      } catch (const LocalError& e) {
        throw ParseError(line_no, e.offset + 1, e.message);
      }
      line_ = line_no;
      pos = eol + 1;
    }
    close_source();
    if (!frame_ && !atoms_) throw ParseError(1, 1, "missing 'frame:' or 'atoms:' declaration");

    ProblemFile file{EvidenceProblem(nullptr, {}), version_};
    if (frame_) {
      file.problem = EvidenceProblem(frame_, std::move(sources_));
    } else {
      file.problem = std::move(*logic_);
    }
    return file;
  }

 private:
  void handle(std::string_view line) {
    std::size_t i = skip_space(line, 0);
    if (i == line.size()) return;
    const std::string_view rest = line.substr(i);
    if (rest.starts_with("version:")) return version(line, i + 8);
    if (rest.starts_with("frame:")) return declare(line, i + 6, false);
    if (rest.starts_with("atoms:")) return declare(line, i + 6, true);
    if (rest.starts_with("source:")) {
      if (!frame_ && !atoms_) throw LocalError{i, "'source:' before 'frame:' or 'atoms:'"};
      expect_end(line, i + 7);
      close_source();
      in_source_ = true;
      return;
    }
    outcome(line, i);
  }

  void version(std::string_view line, std::size_t i) {
    if (seen_directive_) throw LocalError{0, "'version:' must come first"};
    seen_directive_ = true;
    i = skip_space(line, i);
    std::size_t j = i;
    read_label(line, j);
    auto v = parse_number(line.substr(i, j - i));
    if (!v || *v != kFormatVersion) {
      throw LocalError{i, "unsupported format version '" + std::string(line.substr(i, j - i)) + "'"};
    }
    expect_end(line, j);
  }

  void declare(std::string_view line, std::size_t i, bool logic) {
    if (frame_ || atoms_) throw LocalError{0, "frame or atoms declared twice"};
    seen_directive_ = true;
    std::vector<std::string> names;
    for (;;) {
      i = skip_space(line, i);
      if (i >= line.size()) break;
      const std::size_t at = i;
      std::string_view name = read_label(line, i);
      if (name.empty() || (logic && name.front() == '!')) {
        throw LocalError{at, std::string("invalid ") + (logic ? "atom" : "element") + " name"};
      }
      for (const auto& n : names) {
        if (n == name) throw LocalError{at, "duplicate name '" + std::string(name) + "'"};
      }
      names.emplace_back(name);
    }
    if (names.empty()) throw LocalError{line.size(), logic ? "no atoms declared" : "empty frame"};
    if (logic) {
      atoms_ = names;
      logic_.emplace(std::move(names), std::vector<LogicSource>{});
    } else {
      frame_ = Frame::make(std::move(names));
    }
  }

  void outcome(std::string_view line, std::size_t i) {
    if (!in_source_) throw LocalError{i, "outcome line outside a 'source:' block"};
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    auto prob = parse_number(line.substr(i, j - i));
    if (!prob) throw LocalError{i, "expected a probability, got '" + std::string(line.substr(i, j - i)) + "'"};
    std::string_view target = line.substr(j);
    std::size_t end = 0;
    try {
      if (frame_) {
        FocalSet set = set_expr_at(*frame_, target, end);
        expect_end(target, end);
        set_outcomes_.push_back({*prob, std::move(set)});
      } else {
        TermSet terms = terms_at(*logic_, target, end);
        expect_end(target, end);
        logic_outcomes_.push_back({*prob, std::move(terms)});
      }
    } catch (LocalError& e) {
      e.offset += j;
      throw;
    }
  }

  void close_source() {
    if (!in_source_) return;
    in_source_ = false;
    if (frame_) {
      sources_.emplace_back(frame_, std::move(set_outcomes_));
      set_outcomes_.clear();
    } else {
      logic_sources_.push_back({std::move(logic_outcomes_)});
      logic_outcomes_.clear();
      logic_.emplace(*atoms_, logic_sources_);
    }
  }

  int version_ = kFormatVersion;
  std::size_t line_ = 0;
  bool seen_directive_ = false;
  bool in_source_ = false;
  FramePtr frame_;
  std::optional<std::vector<std::string>> atoms_;
  std::optional<LogicProblem> logic_;
  std::vector<SourceModel> sources_;
  std::vector<Outcome> set_outcomes_;
  std::vector<LogicSource> logic_sources_;
  std::vector<LogicOutcome> logic_outcomes_;
};

}  // namespace

ProblemFile parse_problem(std::string_view text, bool validate) {
  ProblemFile file = Parser().run(text);
  if (validate) {
    auto report = file.is_logic() ? validate_logic_problem(file.logic_problem())
                                  : validate_problem(file.set_problem());
    if (!report.empty()) throw InvalidInput(joined(report));
  }
  return file;
}

ProblemFile load_problem(const std::string& path, bool validate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read problem file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), validate);
}

std::string render_set(const Frame& frame, const FocalSet& s) {
  if (s.universe() == frame.size() && s.is_full()) return "*";
  std::string out = "{";
  bool first = true;
  for (std::size_t j : s.indices()) {
    if (!first) out += ' ';
    out += frame.label(j);
    first = false;
  }
  return out + "}";
}

std::string render_terms(const LogicProblem& p, const TermSet& t) {
  std::string out = "[";
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Literal& l = t.literals()[k];
    if (k) out += ' ';
    if (!l.positive) out += '!';
    out += p.atoms().at(l.atom);
  }
  return out + "]";
}

std::string render_clause(const LogicProblem& p, const ClauseQuery& c) {
  std::string out;
  for (std::size_t k = 0; k < c.literals.size(); ++k) {
    const Literal& l = c.literals[k];
    if (k) out += " | ";
    if (!l.positive) out += '!';
    out += p.atoms().at(l.atom);
  }
  return out;
}

std::string render_problem(const EvidenceProblem& p) {
  std::string out = "version: " + std::to_string(kFormatVersion) + "\nframe:";
  for (const auto& label : p.frame()->labels()) out += ' ' + label;
  out += '\n';
  for (const auto& s : p.sources()) {
    out += "source:\n";
    for (const Outcome& o : s.outcomes()) {
      out += "  " + detail::format_exact(o.probability) + ' ' + render_set(*p.frame(), o.target) + '\n';
    }
  }
  return out;
}

std::string render_problem(const LogicProblem& p) {
  std::string out = "version: " + std::to_string(kFormatVersion) + "\natoms:";
  for (const auto& a : p.atoms()) out += ' ' + a;
  out += '\n';
  for (const auto& s : p.sources()) {
    out += "source:\n";
    for (const auto& o : s.outcomes) {
      out += "  " + detail::format_exact(o.probability) + ' ' + render_terms(p, o.terms) + '\n';
    }
  }
  return out;
}

std::string render_problem(const ProblemFile& f) {
  return f.is_logic() ? render_problem(f.logic_problem()) : render_problem(f.set_problem());
}

FocalSet parse_set_expr(const Frame& frame, std::string_view text) {
  try {
    std::size_t end = 0;
    FocalSet s = set_expr_at(frame, text, end);
    expect_end(text, end);
    return s;
  } catch (const LocalError& e) {
    throw InvalidInput("set expression '" + std::string(text) + "', column " +
                       std::to_string(e.offset + 1) + ": " + e.message);
  }
}

TermSet parse_terms(const LogicProblem& p, std::string_view text) {
  try {
    std::size_t end = 0;
    TermSet t = terms_at(p, text, end);
    expect_end(text, end);
    return t;
  } catch (const LocalError& e) {
    throw InvalidInput("term list '" + std::string(text) + "', column " +
                       std::to_string(e.offset + 1) + ": " + e.message);
  }
}

ClauseQuery parse_clause(const LogicProblem& p, std::string_view text) {
  try {
    std::size_t i = skip_space(text, 0);
    std::size_t stop = text.size();
    if (i < text.size() && text[i] == '(') {
      stop = text.rfind(')');
      if (stop == std::string_view::npos || stop < i) throw LocalError{i, "missing ')'"};
      expect_end(text, stop + 1);
      ++i;
    }
    ClauseQuery c;
    // literal ( ('|' | ',') literal )*
    bool want_literal = true;
    std::size_t last_sep = 0;
    while (true) {
      i = skip_space(text, i);
      if (i >= stop) break;
      if (text[i] == '|' || text[i] == ',') {
        if (want_literal) throw LocalError{i, std::string("unexpected '") + text[i] + "'"};
        want_literal = true;
        last_sep = i++;
        continue;
      }
      if (!want_literal) throw LocalError{i, "expected '|' between literals"};
      const std::size_t at = i;
      if (text[i] == '!') ++i;
      read_label(text, i);
      if (i == at || (text[at] == '!' && i == at + 1) || i > stop) {
        throw LocalError{at, std::string("unexpected character '") + text[at] + "'"};
      }
      c.literals.push_back(literal_at(p, text.substr(at, i - at), at));
      want_literal = false;
    }
    if (want_literal && !c.literals.empty()) throw LocalError{last_sep, "clause ends with a separator"};
    if (c.literals.empty()) throw LocalError{0, "empty clause"};
    return c;
  } catch (const LocalError& e) {
    throw InvalidInput("clause '" + std::string(text) + "', column " + std::to_string(e.offset + 1) +
                       ": " + e.message);
  }
}

}  // namespace dsmc
