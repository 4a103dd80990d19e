#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

namespace laf::proof {

/// Propositional formula over atoms, n-ary conjunction and implication.
///
/// Conjunctions are flattened on construction, so `(a & b) & c` and
/// `a & (b & c)` are the same value. Conjunct order is significant.
class Formula {
 public:
  enum class Kind { Atom, Conjunction, Implication };

  static bool is_identifier(std::string_view s) {
    if (s.empty() || s.front() < 'a' || s.front() > 'z') return false;
    for (char c : s) {
      if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
    }
    return true;
  }

  static Formula atom(std::string name) {
    if (!is_identifier(name)) throw std::invalid_argument(fmt::format("bad atom name '{}'", name));
    Formula f(Kind::Atom);
    f.name_ = std::move(name);
    return f;
  }

  static Formula conjunction(std::vector<Formula> parts) {
    Formula f(Kind::Conjunction);
    for (auto& p : parts) {
      if (p.kind_ == Kind::Conjunction) {
        for (auto& q : p.args_) f.args_.push_back(std::move(q));
      } else {
        f.args_.push_back(std::move(p));
      }
    }
    if (f.args_.size() < 2) throw std::invalid_argument("conjunction needs at least two conjuncts");
    return f;
  }

  static Formula implication(Formula antecedent, Formula consequent) {
    Formula f(Kind::Implication);
    f.args_.push_back(std::move(antecedent));
    f.args_.push_back(std::move(consequent));
    return f;
  }

  Kind kind() const { return kind_; }
  bool is_atom() const { return kind_ == Kind::Atom; }
  bool is_conjunction() const { return kind_ == Kind::Conjunction; }
  bool is_implication() const { return kind_ == Kind::Implication; }

  const std::string& name() const { return name_; }
  std::span<const Formula> conjuncts() const { return args_; }
  const Formula& antecedent() const { return args_.at(0); }
  const Formula& consequent() const { return args_.at(1); }

  void collect_atoms(std::set<std::string>& out) const {
    if (is_atom()) {
      out.insert(name_);
      return;
    }
    for (const auto& a : args_) a.collect_atoms(out);
  }

  bool operator==(const Formula&) const = default;

 private:
  explicit Formula(Kind k) : kind_(k) {}

  Kind kind_;
  std::string name_;
  std::vector<Formula> args_;
};

/// Equality modulo conjunction associativity. Formulas are stored flattened,
/// so this is structural equality.
inline bool normalize_equal(const Formula& f, const Formula& g) { return f == g; }

/// Prints with the fewest parentheses that parse back to the same formula.
inline std::string to_string(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      return f.name();
    case Formula::Kind::Conjunction: {
      std::string out;
      for (const auto& c : f.conjuncts()) {
        if (!out.empty()) out += " & ";
        out += c.is_implication() ? "(" + to_string(c) + ")" : to_string(c);
      }
      return out;
    }
    case Formula::Kind::Implication: {
      const auto& lhs = f.antecedent();
      std::string left = lhs.is_implication() ? "(" + to_string(lhs) + ")" : to_string(lhs);
      return left + " -> " + to_string(f.consequent());
    }
  }
  return {};
}

class FormulaSyntaxError : public std::invalid_argument {
 public:
  FormulaSyntaxError(std::size_t col, const std::string& what)
      : std::invalid_argument(fmt::format("column {}: {}", col, what)), column(col), reason(what) {}

  /// 1-based column in the parsed text.
  std::size_t column;
  std::string reason;
};

namespace detail {

// implication := conjunction ( "->" implication )?
// conjunction := primary ( "&" primary )*
// primary     := atom | "(" implication ")"
class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  Formula parse() {
    Formula f = implication();
    skip_ws();
    if (pos_ < text_.size()) fail(fmt::format("unexpected '{}'", text_[pos_]));
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw FormulaSyntaxError(pos_ + 1, what); }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  Formula implication() {
    Formula lhs = conjunction();
    if (accept("->")) return Formula::implication(std::move(lhs), implication());
    return lhs;
  }

  Formula conjunction() {
    std::vector<Formula> parts;
    parts.push_back(primary());
    while (accept("&")) parts.push_back(primary());
    if (parts.size() == 1) return std::move(parts.front());
    return Formula::conjunction(std::move(parts));
  }

  Formula primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of formula");
    if (accept("(")) {
      Formula inner = implication();
      if (!accept(")")) fail("expected ')'");
      return inner;
    }
    const std::size_t start = pos_;
    if (text_[pos_] < 'a' || text_[pos_] > 'z') fail(fmt::format("unexpected '{}'", text_[pos_]));
    while (pos_ < text_.size() &&
           ((text_[pos_] >= 'a' && text_[pos_] <= 'z') ||
            (text_[pos_] >= '0' && text_[pos_] <= '9') || text_[pos_] == '_')) {
      ++pos_;
    }
    return Formula::atom(std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `&` (left-associative, binds tighter) and `->` (right-associative)
/// over lowercase atoms, with parentheses.
inline Formula parse_formula(std::string_view text) { return detail::FormulaParser(text).parse(); }

}  // namespace laf::proof
