#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "laf/engine.hpp"

namespace laf::mpe {

enum class LmpMetric { Lf1, LfIoU };

inline std::string_view to_string(LmpMetric m) { return m == LmpMetric::Lf1 ? "lf1" : "lfiou"; }

inline LmpMetric parse_metric(std::string_view s) {
  if (s == "lf1") return LmpMetric::Lf1;
  if (s == "lfiou") return LmpMetric::LfIoU;
  throw std::invalid_argument(fmt::format("unknown metric '{}' (expected lf1 or lfiou)", s));
}

struct MethodRecord {
  std::string name;
  LamReport report;
};

/// Logical method performance: one score in [0, 1] picked from a report.
struct Lmp {
  double value = 0.0;
  LmpMetric metric = LmpMetric::Lf1;
  std::string method;
};

enum class Confidence { ReasonablyReflectsOverall, Indeterminate, LogicalOnly };

inline std::string_view to_string(Confidence c) {
  switch (c) {
    case Confidence::ReasonablyReflectsOverall: return "ReasonablyReflectsOverall";
    case Confidence::Indeterminate: return "Indeterminate";
    case Confidence::LogicalOnly: return "LogicalOnly";
  }
  return "?";
}

// Not calibrated values: "small enough" and "large enough" are only known to
// be thresholds, so these are configurable defaults.
inline constexpr double kDefaultTauSmall = 0.5;
inline constexpr double kDefaultTauLarge = 0.75;

struct ConfidenceClass {
  Confidence cls;
  double tau_small;
  double tau_large;
};

/// Selection of the overall-performance metric (Lf1 or LfIoU). A degenerate
/// report carries 0 in the affected field, so it selects 0.
inline Lmp select_lmp(const MethodRecord& record, LmpMetric metric) {
  const double v = metric == LmpMetric::Lf1 ? record.report.lf1 : record.report.lfiou;
  return {v, metric, record.name};
}

struct RankedMethod {
  std::string name;
  double value = 0.0;
  std::size_t rank = 0;
};

/// Descending by value. Equal values share the smaller rank and are listed
/// alphabetically.
inline std::vector<RankedMethod> rank_methods(const std::vector<MethodRecord>& records,
                                              LmpMetric metric) {
  if (records.empty()) throw std::invalid_argument("cannot rank an empty set of methods");
  std::set<std::string_view> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.name).second) {
      throw std::invalid_argument(fmt::format("duplicate method name '{}'", r.name));
    }
  }

  std::vector<RankedMethod> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.name, select_lmp(r, metric).value, 0});
  std::sort(out.begin(), out.end(), [](const RankedMethod& a, const RankedMethod& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.name < b.name;
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].rank = (i > 0 && out[i].value == out[i - 1].value) ? out[i - 1].rank : i + 1;
  }
  return out;
}

inline void validate_thresholds(double tau_small, double tau_large) {
  if (!(tau_small >= 0.0 && tau_small < tau_large && tau_large <= 1.0)) {
    throw std::invalid_argument(fmt::format(
        "invalid thresholds: need 0 <= tau_small < tau_large <= 1, got {} and {}", tau_small,
        tau_large));
  }
}

inline ConfidenceClass classify_confidence(const Lmp& lmp, double tau_small = kDefaultTauSmall,
                                           double tau_large = kDefaultTauLarge) {
  validate_thresholds(tau_small, tau_large);
  Confidence c = Confidence::Indeterminate;
  if (lmp.value <= tau_small) {
    c = Confidence::ReasonablyReflectsOverall;
  } else if (lmp.value >= tau_large) {
    c = Confidence::LogicalOnly;
  }
  return {c, tau_small, tau_large};
}

/// Multiplicative overall-performance model: logical value times the value of
/// the non-logical evaluation.
inline double overall_performance(double logical, double non_logical) {
  auto check = [](double v, std::string_view what) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(fmt::format("{} value {} outside [0, 1]", what, v));
    }
  };
  check(logical, "logical");
  check(non_logical, "non-logical");
  return logical * non_logical;
}

// ---------------------------------------------------------------------------
// Ranking tables.

struct RankingRow {
  std::string method;
  LmpMetric metric;
  double value;
  std::size_t rank;
  Confidence confidence;
};

inline std::vector<RankingRow> rank_with_confidence(const std::vector<MethodRecord>& records,
                                                    LmpMetric metric,
                                                    double tau_small = kDefaultTauSmall,
                                                    double tau_large = kDefaultTauLarge) {
  validate_thresholds(tau_small, tau_large);
  std::vector<RankingRow> rows;
  for (const auto& r : rank_methods(records, metric)) {
    const auto cls = classify_confidence({r.value, metric, r.name}, tau_small, tau_large);
    rows.push_back({r.name, metric, r.value, r.rank, cls.cls});
  }
  return rows;
}

inline std::string to_tsv(const std::vector<RankingRow>& rows) {
  std::string out = "method\tmetric\tvalue\trank\tconfidence_class\n";
  for (const auto& r : rows) {
    out += fmt::format("{}\t{}\t{:.6f}\t{}\t{}\n", r.method, to_string(r.metric), r.value, r.rank,
                       to_string(r.confidence));
  }
  return out;
}

inline std::string to_json(const std::vector<RankingRow>& rows) {
  std::string out = "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += fmt::format(
        "{}{{\"method\":{},\"metric\":\"{}\",\"value\":{:.6f},\"rank\":{},\"confidence_class\":\"{}\"}}",
        i == 0 ? "" : ",", nlohmann::json(r.method).dump(), to_string(r.metric), r.value, r.rank,
        to_string(r.confidence));
  }
  out += "]\n";
  return out;
}

}  // namespace laf::mpe
