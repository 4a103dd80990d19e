#pragma once

#include <charconv>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "laf/proof/formula.hpp"

namespace laf::proof {

enum class Rule { Premise, Hypothesis, AndElim, AndIntro, ModusPonens, ConditionalProof };

inline std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::Premise: return "premise";
    case Rule::Hypothesis: return "hypothesis";
    case Rule::AndElim: return "andE";
    case Rule::AndIntro: return "andI";
    case Rule::ModusPonens: return "mp";
    case Rule::ConditionalProof: return "condproof";
  }
  return "?";
}

/// Rule plus cited line numbers: andE {src}, andI {s1, s2, ...},
/// mp {implication, antecedent}, condproof {first, last}.
struct Justification {
  Rule rule = Rule::Premise;
  std::vector<std::size_t> refs;

  bool operator==(const Justification&) const = default;
};

struct Premise {
  std::size_t index = 0;
  Formula formula;

  bool operator==(const Premise&) const = default;
};

struct ProofStep {
  std::size_t index = 0;
  Formula formula;
  Justification by;

  bool operator==(const ProofStep&) const = default;
};

struct ProofScript {
  std::string name;
  std::vector<Premise> premises;
  Formula goal = Formula::atom("goal");
  std::vector<ProofStep> steps;

  bool operator==(const ProofScript&) const = default;
};

class ScriptSyntaxError : public std::invalid_argument {
 public:
  ScriptSyntaxError(std::size_t line_no, std::size_t col, const std::string& what)
      : std::invalid_argument(fmt::format("line {}, column {}: {}", line_no, col, what)),
        line(line_no),
        column(col) {}

  std::size_t line;
  std::size_t column;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<std::size_t> to_index(std::string_view s) {
  s = trim(s);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || v == 0) return std::nullopt;
  return v;
}

class ScriptParser {
 public:
  explicit ScriptParser(std::string_view text) : text_(text) {}

  ProofScript parse() {
    ProofScript script;
    bool have_name = false;
    bool have_goal = false;
    bool done = false;
    std::size_t start = 0;
    while (start <= text_.size()) {
      auto end = text_.find('\n', start);
      if (end == std::string_view::npos) end = text_.size();
      raw_ = text_.substr(start, end - start);
      ++line_no_;
      start = end + 1;

      std::string_view line = raw_;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (done) fail(line, "content after qed");

      if (line.starts_with("proof ")) {
        if (have_name) fail(line, "duplicate proof header");
        script.name = std::string(trim(line.substr(6)));
        if (script.name.empty()) fail(line, "missing proof name");
        have_name = true;
        continue;
      }
      if (!have_name) fail(line, "expected 'proof <name>' first");

      if (line == "qed") {
        done = true;
      } else if (line.starts_with("premise ")) {
        if (!script.steps.empty()) fail(line, "premise after first step");
        const auto [index, body] = numbered(line.substr(8));
        script.premises.push_back({index, formula(body)});
      } else if (line.starts_with("goal:")) {
        if (have_goal) fail(line, "duplicate goal");
        script.goal = formula(line.substr(5));
        have_goal = true;
      } else if (line.starts_with("step ")) {
        const auto [index, body] = numbered(line.substr(5));
        const auto by = body.rfind(" by ");
        if (by == std::string_view::npos) fail(body, "missing ' by <rule>'");
        script.steps.push_back({index, formula(body.substr(0, by)), justification(body.substr(by + 4))});
      } else {
        fail(line, "unrecognised line");
      }
    }
    if (!have_name) throw ScriptSyntaxError(line_no_, 1, "missing 'proof <name>' header");
    if (!have_goal) throw ScriptSyntaxError(line_no_, 1, "missing goal");
    if (!done) throw ScriptSyntaxError(line_no_, 1, "missing qed");
    return script;
  }

 private:
  std::size_t column_of(std::string_view part) const {
    return static_cast<std::size_t>(part.data() - raw_.data()) + 1;
  }

  [[noreturn]] void fail(std::string_view at, const std::string& what) const {
    throw ScriptSyntaxError(line_no_, column_of(at), what);
  }

  std::pair<std::size_t, std::string_view> numbered(std::string_view rest) {
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) fail(rest, "expected '<k>:'");
    const auto index = to_index(rest.substr(0, colon));
    if (!index) fail(rest, "line number must be a positive integer");
    return {*index, rest.substr(colon + 1)};
  }

  Formula formula(std::string_view text) {
    try {
      return parse_formula(text);
    } catch (const FormulaSyntaxError& e) {
      throw ScriptSyntaxError(line_no_, column_of(text) + e.column - 1, e.reason);
    }
  }

  std::vector<std::size_t> refs(std::string_view text, char sep) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (true) {
      const auto pos = text.find(sep, start);
      const auto part = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
      const auto idx = to_index(part);
      if (!idx) fail(part.empty() ? text : part, "bad line reference");
      out.push_back(*idx);
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return out;
  }

  Justification justification(std::string_view text) {
    text = trim(text);
    const auto space = text.find(' ');
    const auto rule = text.substr(0, space);
    const auto args = space == std::string_view::npos ? std::string_view{} : trim(text.substr(space + 1));
    if (rule == "premise" || rule == "hypothesis") {
      if (!args.empty()) fail(args, fmt::format("'{}' takes no references", rule));
      return {rule == "premise" ? Rule::Premise : Rule::Hypothesis, {}};
    }
    if (rule == "andE") {
      if (args.empty()) fail(text, fmt::format("'{}' needs line references", rule));
      auto r = refs(args, ',');
      if (r.size() != 1) fail(args, "andE cites exactly one line");
      return {Rule::AndElim, r};
    }
    if (rule == "andI") {
      if (args.empty()) fail(text, fmt::format("'{}' needs line references", rule));
      auto r = refs(args, ',');
      if (r.size() < 2) fail(args, "andI cites at least two lines");
      return {Rule::AndIntro, r};
    }
    if (rule == "mp") {
      if (args.empty()) fail(text, fmt::format("'{}' needs line references", rule));
      auto r = refs(args, ',');
      if (r.size() != 2) fail(args, "mp cites exactly two lines");
      return {Rule::ModusPonens, r};
    }
    if (rule == "condproof") {
      if (args.empty()) fail(text, fmt::format("'{}' needs line references", rule));
      auto r = refs(args, '-');
      if (r.size() != 2) fail(args, "condproof cites a range s-t");
      return {Rule::ConditionalProof, r};
    }
    fail(text, fmt::format("unknown rule '{}'", rule));
  }

  std::string_view text_;
  std::string_view raw_;
  std::size_t line_no_ = 0;
};

}  // namespace detail

inline ProofScript parse_script(std::string_view text) { return detail::ScriptParser(text).parse(); }

/// Canonical text form; parse_script(to_text(s)) == s.
inline std::string to_text(const ProofScript& s) {
  std::string out = fmt::format("proof {}\n", s.name);
  for (const auto& p : s.premises) out += fmt::format("premise {}: {}\n", p.index, to_string(p.formula));
  out += fmt::format("goal: {}\n", to_string(s.goal));
  for (const auto& st : s.steps) {
    std::string by(to_string(st.by.rule));
    const auto& r = st.by.refs;
    if (st.by.rule == Rule::ConditionalProof && r.size() == 2) {
      by += fmt::format(" {}-{}", r[0], r[1]);
    } else if (!r.empty()) {
      by += fmt::format(" {}", fmt::join(r, ","));
    }
    out += fmt::format("step {}: {} by {}\n", st.index, to_string(st.formula), by);
  }
  out += "qed\n";
  return out;
}

}  // namespace laf::proof
