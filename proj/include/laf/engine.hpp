#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "laf/mask.hpp"

namespace laf {

enum class TargetRole { HighRecall, HighPrecision };

inline std::string_view to_string(TargetRole r) {
  return r == TargetRole::HighRecall ? "HighRecall" : "HighPrecision";
}

struct Target {
  BinaryMask mask;
  TargetRole role;
};

/// Ordered inaccurate targets sharing one raster size.
class InaccurateTargetSet {
 public:
  InaccurateTargetSet(std::initializer_list<Target> targets)
      : InaccurateTargetSet(std::vector<Target>(targets)) {}

  explicit InaccurateTargetSet(std::vector<Target> targets) : targets_(std::move(targets)) {
    if (targets_.empty()) throw std::invalid_argument("inaccurate target set is empty");
    for (const auto& t : targets_) require_same_dimensions(targets_.front().mask, t.mask);
  }

  std::size_t size() const { return targets_.size(); }
  const Target& operator[](std::size_t i) const { return targets_.at(i); }
  auto begin() const { return targets_.begin(); }
  auto end() const { return targets_.end(); }
  Dimensions dimensions() const { return targets_.front().mask.dimensions(); }

  std::size_t count(TargetRole role) const {
    return static_cast<std::size_t>(std::count_if(
        targets_.begin(), targets_.end(), [&](const Target& t) { return t.role == role; }));
  }

 private:
  std::vector<Target> targets_;
};

enum class FactKind { NegativesAreTrueNegatives, PositivesAreTruePositives };

inline std::string_view to_string(FactKind k) {
  return k == FactKind::NegativesAreTrueNegatives ? "NegativesAreTrueNegatives"
                                                  : "PositivesAreTruePositives";
}

struct LogicalFact {
  FactKind kind;
  std::size_t target_index;
  std::string narration;

  bool operator==(const LogicalFact&) const = default;
};

enum class ConsistencyKind { LogicallyFalsePositive, LogicallyTruePositive, LogicallyFalseNegative };

inline std::string_view to_string(ConsistencyKind k) {
  switch (k) {
    case ConsistencyKind::LogicallyFalsePositive: return "LogicallyFalsePositive";
    case ConsistencyKind::LogicallyTruePositive: return "LogicallyTruePositive";
    case ConsistencyKind::LogicallyFalseNegative: return "LogicallyFalseNegative";
  }
  return "?";
}

struct LogicalConsistency {
  ConsistencyKind kind;
  PixelCount count;
  std::size_t source_fact;
  std::string narration;

  bool operator==(const LogicalConsistency&) const = default;
};

// ---------------------------------------------------------------------------
// Rule sets. Each stage of the pipeline is driven by named, versioned data so
// a new task adds rules instead of pipeline code.

/// Turns a target with `role` into a fact. `narration` may contain `{}` for
/// the target index.
struct NarrationRule {
  TargetRole role;
  FactKind fact;
  std::string narration;
};

struct NarrationRuleSet {
  std::string name;
  int version = 1;
  std::vector<NarrationRule> rules;
  std::vector<TargetRole> required_roles;
};

/// Counts |prediction_region(t) ∩ target_region(target of fact)| as `kind`.
struct EstimationRule {
  FactKind fact;
  ConsistencyKind kind;
  Region prediction_region;
  Region target_region;
  std::string narration;
};

struct EstimationRuleSet {
  std::string name;
  int version = 1;
  std::vector<EstimationRule> rules;
};

struct MetricRuleSet {
  std::string name;
  int version = 1;
  std::vector<ConsistencyKind> required_kinds;
};

struct LafConfig {
  NarrationRuleSet narration;
  EstimationRuleSet estimation;
  MetricRuleSet metrics;

  /// The two-target segmentation rule set: a high-recall target vouches for
  /// its negatives, a high-precision target vouches for its positives.
  static LafConfig tsfbc() {
    LafConfig c;
    c.narration = {
        "tsfbc-narration",
        1,
        {{TargetRole::HighRecall, FactKind::NegativesAreTrueNegatives,
          "pixels in the negative area of target {} are most probably true negatives"},
         {TargetRole::HighPrecision, FactKind::PositivesAreTruePositives,
          "pixels in the positive area of target {} are most probably true positives"}},
        {TargetRole::HighRecall, TargetRole::HighPrecision}};
    c.estimation = {
        "tsfbc-estimation",
        1,
        {{FactKind::NegativesAreTrueNegatives, ConsistencyKind::LogicallyFalsePositive,
          Region::Positive, Region::Negative,
          "predicted positives inside the negative area of target {} are logically false positives"},
         {FactKind::PositivesAreTruePositives, ConsistencyKind::LogicallyTruePositive,
          Region::Positive, Region::Positive,
          "predicted positives inside the positive area of target {} are logically true positives"},
         {FactKind::PositivesAreTruePositives, ConsistencyKind::LogicallyFalseNegative,
          Region::Negative, Region::Positive,
          "predicted negatives inside the positive area of target {} are logically false negatives"}}};
    c.metrics = {"tsfbc-metrics",
                 1,
                 {ConsistencyKind::LogicallyTruePositive, ConsistencyKind::LogicallyFalsePositive,
                  ConsistencyKind::LogicallyFalseNegative}};
    return c;
  }

  std::string id() const {
    return fmt::format("{}/{}+{}/{}+{}/{}", narration.name, narration.version, estimation.name,
                       estimation.version, metrics.name, metrics.version);
  }
};

class LafError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Stage 1: fact narration.

inline std::vector<LogicalFact> narrate_facts(const InaccurateTargetSet& targets,
                                              const LafConfig& config) {
  for (auto role : config.narration.required_roles) {
    if (targets.count(role) == 0) {
      throw LafError(fmt::format("rule set {} requires a {} target", config.narration.name,
                                 to_string(role)));
    }
  }
  std::vector<LogicalFact> facts;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (const auto& rule : config.narration.rules) {
      if (rule.role != targets[i].role) continue;
      facts.push_back({rule.fact, i, fmt::format(fmt::runtime(rule.narration), i)});
    }
  }
  return facts;
}

// ---------------------------------------------------------------------------
// Stage 2: consistency estimation.

inline std::vector<LogicalConsistency> estimate_consistencies(
    const BinaryMask& prediction, const std::vector<LogicalFact>& facts,
    const InaccurateTargetSet& targets, const LafConfig& config) {
  if (prediction.dimensions() != targets.dimensions()) {
    throw DimensionMismatch(prediction.dimensions(), targets.dimensions());
  }
  std::vector<LogicalConsistency> out;
  for (std::size_t f = 0; f < facts.size(); ++f) {
    const auto& fact = facts[f];
    if (fact.target_index >= targets.size()) {
      throw LafError(fmt::format("fact {} cites target {} but only {} targets exist", f,
                                 fact.target_index, targets.size()));
    }
    const auto& target = targets[fact.target_index].mask;
    for (const auto& rule : config.estimation.rules) {
      if (rule.fact != fact.kind) continue;
      out.push_back({rule.kind,
                     region_count(prediction, rule.prediction_region, target, rule.target_region),
                     f, fmt::format(fmt::runtime(rule.narration), fact.target_index)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stage 3: metric build.

struct LamReport {
  PixelCount ltp;
  PixelCount lfp;
  PixelCount lfn;
  double lprecision = 0.0;
  double lrecall = 0.0;
  double lf1 = 0.0;
  double lfiou = 0.0;
  /// Some denominator was zero and the affected metrics were set to 0.
  bool degenerate = false;

  bool operator==(const LamReport&) const = default;
};

/// Precision, recall, F1 and IoU from logical confusion counts. A zero
/// denominator yields 0 and marks the report degenerate.
inline LamReport make_report(PixelCount ltp, PixelCount lfp, PixelCount lfn) {
  LamReport r{ltp, lfp, lfn};
  const auto tp = static_cast<double>(ltp.value);
  auto ratio = [&](std::uint64_t den) {
    if (den == 0) {
      r.degenerate = true;
      return 0.0;
    }
    return tp / static_cast<double>(den);
  };
  r.lprecision = ratio(ltp.value + lfp.value);
  r.lrecall = ratio(ltp.value + lfn.value);
  if (r.lprecision + r.lrecall > 0.0) {
    r.lf1 = 2.0 * r.lprecision * r.lrecall / (r.lprecision + r.lrecall);
  } else {
    r.lf1 = 0.0;
    r.degenerate = true;
  }
  r.lfiou = ratio(ltp.value + lfp.value + lfn.value);
  return r;
}

inline LamReport build_metrics(const std::vector<LogicalConsistency>& consistencies,
                               const LafConfig& config) {
  std::array<std::optional<PixelCount>, 3> found;
  for (const auto& c : consistencies) {
    auto& slot = found[static_cast<std::size_t>(c.kind)];
    if (slot) throw LafError(fmt::format("duplicate consistency kind {}", to_string(c.kind)));
    slot = c.count;
  }
  for (auto kind : config.metrics.required_kinds) {
    if (!found[static_cast<std::size_t>(kind)]) {
      throw LafError(fmt::format("missing consistency kind {}", to_string(kind)));
    }
  }
  auto get = [&](ConsistencyKind k) { return found[static_cast<std::size_t>(k)].value_or(PixelCount{}); };
  return make_report(get(ConsistencyKind::LogicallyTruePositive),
                     get(ConsistencyKind::LogicallyFalsePositive),
                     get(ConsistencyKind::LogicallyFalseNegative));
}

/// Full pipeline: narrate, estimate, build.
inline LamReport evaluate(const BinaryMask& prediction, const InaccurateTargetSet& targets,
                          const LafConfig& config = LafConfig::tsfbc()) {
  const auto facts = narrate_facts(targets, config);
  return build_metrics(estimate_consistencies(prediction, facts, targets, config), config);
}

// ---------------------------------------------------------------------------
// Serialization.

inline std::string to_json(const LamReport& r) {
  return fmt::format(
      "{{\"ltp\":{},\"lfp\":{},\"lfn\":{},\"lprecision\":{:.6f},\"lrecall\":{:.6f},"
      "\"lf1\":{:.6f},\"lfiou\":{:.6f},\"degenerate\":{}}}",
      r.ltp.value, r.lfp.value, r.lfn.value, r.lprecision, r.lrecall, r.lf1, r.lfiou,
      r.degenerate);
}

inline std::string to_tsv(const LamReport& r) {
  return fmt::format(
      "ltp\tlfp\tlfn\tlprecision\tlrecall\tlf1\tlfiou\tdegenerate\n"
      "{}\t{}\t{}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\t{}\n",
      r.ltp.value, r.lfp.value, r.lfn.value, r.lprecision, r.lrecall, r.lf1, r.lfiou,
      r.degenerate);
}

}  // namespace laf
