#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "laf/file_io.hpp"
#include "laf/proof/formula.hpp"
#include "laf/proof/script.hpp"

namespace laf::proof {

/// Outcome of checking a script. On rejection `step` is the first offending
/// line number (0 when the script as a whole is at fault).
struct Verdict {
  bool accepted = false;
  std::size_t step = 0;
  std::string rule;
  std::string reason;

  static Verdict accept() { return {true, 0, {}, {}}; }
  static Verdict reject(std::size_t step, std::string_view rule, std::string reason) {
    return {false, step, std::string(rule), std::move(reason)};
  }

  std::string describe() const {
    if (accepted) return "accepted";
    return fmt::format("rejected at step {} ({}): {}", step, rule, reason);
  }
};

namespace detail {

struct Line {
  const Formula* formula;
  bool usable = true;
};

class Checker {
 public:
  explicit Checker(const ProofScript& s) : script_(s) {}

  Verdict run() {
    std::size_t last_index = 0;
    for (const auto& p : script_.premises) {
      if (p.index <= last_index) {
        return Verdict::reject(p.index, "premise", "line numbers must strictly increase");
      }
      lines_[p.index] = {&p.formula};
      last_index = p.index;
    }
    if (script_.steps.empty()) return Verdict::reject(0, "qed", "proof has no steps");

    for (const auto& step : script_.steps) {
      if (step.index <= last_index) {
        return Verdict::reject(step.index, to_string(step.by.rule),
                               "line numbers must strictly increase");
      }
      if (auto v = check_step(step, last_index); !v.accepted) return v;
      lines_[step.index] = {&step.formula};
      last_index = step.index;
    }

    const auto& final_step = script_.steps.back();
    if (!open_.empty()) {
      return Verdict::reject(final_step.index, "condproof",
                             fmt::format("subproof opened at {} is never closed", open_.back()));
    }
    if (!normalize_equal(final_step.formula, script_.goal)) {
      return Verdict::reject(final_step.index, "goal",
                             fmt::format("final line '{}' does not match goal '{}'",
                                         to_string(final_step.formula), to_string(script_.goal)));
    }
    return Verdict::accept();
  }

 private:
  // Resolves a cited line, or returns the reason it cannot be used.
  const Formula* cite(std::size_t ref, std::size_t at, std::string& why) const {
    const auto it = lines_.find(ref);
    if (ref >= at || it == lines_.end()) {
      why = fmt::format("cites line {} which does not precede it", ref);
      return nullptr;
    }
    if (!it->second.usable) {
      why = fmt::format("cites line {} inside a closed subproof", ref);
      return nullptr;
    }
    return it->second.formula;
  }

  Verdict check_step(const ProofStep& step, std::size_t previous) {
    const auto rule = to_string(step.by.rule);
    auto reject = [&](std::string reason) { return Verdict::reject(step.index, rule, std::move(reason)); };

    std::vector<const Formula*> cited;
    for (auto ref : step.by.refs) {
      std::string why;
      const Formula* f = cite(ref, step.index, why);
      if (f == nullptr) return reject(why);
      cited.push_back(f);
    }

    switch (step.by.rule) {
      case Rule::Premise: {
        const bool listed = std::any_of(script_.premises.begin(), script_.premises.end(),
                                        [&](const Premise& p) { return normalize_equal(p.formula, step.formula); });
        if (!listed) return reject(fmt::format("'{}' is not a premise", to_string(step.formula)));
        break;
      }
      case Rule::Hypothesis:
        open_.push_back(step.index);
        break;
      case Rule::AndElim: {
        if (cited.size() != 1) return reject("andE cites exactly one line");
        const Formula& src = *cited[0];
        if (!src.is_conjunction()) {
          return reject(fmt::format("line {} is not a conjunction", step.by.refs[0]));
        }
        const auto parts = src.conjuncts();
        if (std::none_of(parts.begin(), parts.end(),
                         [&](const Formula& c) { return normalize_equal(c, step.formula); })) {
          return reject(fmt::format("'{}' is not a conjunct of line {}", to_string(step.formula),
                                    step.by.refs[0]));
        }
        break;
      }
      case Rule::AndIntro: {
        if (cited.size() < 2) return reject("andI cites at least two lines");
        std::vector<Formula> parts;
        for (const auto* f : cited) parts.push_back(*f);
        const Formula expected = Formula::conjunction(std::move(parts));
        if (!normalize_equal(expected, step.formula)) {
          return reject(fmt::format("cited lines give '{}', not '{}'", to_string(expected),
                                    to_string(step.formula)));
        }
        break;
      }
      case Rule::ModusPonens: {
        if (cited.size() != 2) return reject("mp cites exactly two lines");
        const Formula& impl = *cited[0];
        if (!impl.is_implication()) {
          return reject(fmt::format("line {} is not an implication", step.by.refs[0]));
        }
        if (!normalize_equal(impl.antecedent(), *cited[1])) {
          return reject(fmt::format("line {} does not match the antecedent of line {}",
                                    step.by.refs[1], step.by.refs[0]));
        }
        if (!normalize_equal(impl.consequent(), step.formula)) {
          return reject(fmt::format("line {} yields '{}', not '{}'", step.by.refs[0],
                                    to_string(impl.consequent()), to_string(step.formula)));
        }
        break;
      }
      case Rule::ConditionalProof: {
        if (cited.size() != 2) return reject("condproof cites a range s-t");
        const auto first = step.by.refs[0];
        const auto last = step.by.refs[1];
        if (open_.empty() || open_.back() != first) {
          return reject(fmt::format("line {} is not the hypothesis of the innermost open subproof", first));
        }
        if (last != previous) {
          return reject(fmt::format("subproof must end at the preceding line {}, not {}", previous, last));
        }
        const Formula expected = Formula::implication(*cited[0], *cited[1]);
        if (!normalize_equal(expected, step.formula)) {
          return reject(fmt::format("discharge gives '{}', not '{}'", to_string(expected),
                                    to_string(step.formula)));
        }
        for (auto it = lines_.lower_bound(first); it != lines_.end() && it->first <= last; ++it) {
          it->second.usable = false;
        }
        open_.pop_back();
        break;
      }
    }
    return Verdict::accept();
  }

  const ProofScript& script_;
  std::map<std::size_t, Line> lines_;
  std::vector<std::size_t> open_;
};

}  // namespace detail

/// Checks every step against the conjunction, modus ponens and
/// conditional-proof rules. Never throws for an ill-formed derivation; the
/// verdict names the first failing step instead.
inline Verdict check_proof(const ProofScript& script) { return detail::Checker(script).run(); }

struct ScriptReport {
  std::string name;
  std::string file;
  std::size_t steps = 0;
  Verdict verdict;
};

struct CorpusReport {
  std::vector<ScriptReport> scripts;

  std::size_t accepted() const {
    return static_cast<std::size_t>(std::count_if(scripts.begin(), scripts.end(),
                                                  [](const ScriptReport& r) { return r.verdict.accepted; }));
  }
  bool all_accepted() const { return !scripts.empty() && accepted() == scripts.size(); }
};

/// Parses and checks every `*.proof` file in `dir`, in file-name order. A
/// script that fails to parse is reported as rejected.
inline CorpusReport verify_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error(fmt::format("proof corpus directory {} not found", dir.string()));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".proof") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  CorpusReport report;
  for (const auto& file : files) {
    ScriptReport r;
    r.file = file.filename().string();
    try {
      const auto script = parse_script(read_text_file(file));
      r.name = script.name;
      r.steps = script.steps.size();
      r.verdict = check_proof(script);
    } catch (const ScriptSyntaxError& e) {
      r.name = file.stem().string();
      r.verdict = Verdict::reject(0, "syntax", e.what());
    }
    report.scripts.push_back(std::move(r));
  }
  return report;
}

}  // namespace laf::proof
