#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "laf/counts.hpp"
#include "laf/mpe.hpp"
#include "laf/file_io.hpp"

namespace laf::synth {

enum class TableId { PreTreatment, PostTreatment };

inline std::string_view to_string(TableId t) {
  return t == TableId::PreTreatment ? "pre_treatment" : "post_treatment";
}

inline TableId parse_table_id(std::string_view s) {
  if (s == "pre_treatment") return TableId::PreTreatment;
  if (s == "post_treatment") return TableId::PostTreatment;
  throw std::invalid_argument(fmt::format("unknown table '{}' (expected pre_treatment or post_treatment)", s));
}

/// Published derived columns. Percentages are kept as integer hundredths so
/// comparisons are exact.
struct PublishedRow {
  std::string method;
  std::int64_t lprecision = 0;
  std::int64_t lrecall = 0;
  std::int64_t lf1 = 0;
  std::int64_t lfiou = 0;
  std::size_t rank = 0;
};

struct BundledTable {
  TableId id;
  std::vector<MethodCounts> counts;
  std::vector<PublishedRow> published;
};

/// Parses "71.69" into 7169. Exactly two decimals are required.
inline std::int64_t parse_hundredths(std::string_view s, std::size_t line_no) {
  const auto dot = s.find('.');
  if (dot == std::string_view::npos || s.size() - dot != 3) {
    throw CsvError(line_no, fmt::format("'{}' is not a percentage with two decimals", s));
  }
  const auto whole = laf::detail::parse_u64(s.substr(0, dot), line_no, "percentage");
  const auto frac = laf::detail::parse_u64(s.substr(dot + 1), line_no, "percentage");
  return static_cast<std::int64_t>(whole * 100 + frac);
}

inline std::vector<PublishedRow> parse_published_csv(std::string_view text) {
  const auto lines = laf::detail::data_lines(text);
  if (lines.empty() || lines.front().second != "method,lprecision,lrecall,lf1,lfiou,rank") {
    throw CsvError(lines.empty() ? 1 : lines.front().first,
                   "expected header 'method,lprecision,lrecall,lf1,lfiou,rank'");
  }
  std::vector<PublishedRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [no, line] = lines[i];
    const auto c = laf::detail::split(line, ',');
    if (c.size() != 6) throw CsvError(no, fmt::format("expected 6 fields, got {}", c.size()));
    rows.push_back({std::string(c[0]), parse_hundredths(c[1], no), parse_hundredths(c[2], no),
                    parse_hundredths(c[3], no), parse_hundredths(c[4], no),
                    static_cast<std::size_t>(laf::detail::parse_u64(c[5], no, "rank"))});
  }
  return rows;
}

inline BundledTable load_bundled_table(const std::filesystem::path& tables_dir, TableId id) {
  const auto stem = std::string(to_string(id));
  return {id, parse_counts_csv(read_text_file(tables_dir / (stem + "_counts.csv"))),
          parse_published_csv(read_text_file(tables_dir / (stem + "_published.csv")))};
}

/// round_half_up(100 * num / den, 2 decimals), in hundredths of a percent,
/// computed in exact integer arithmetic.
inline std::int64_t percent_hundredths(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return 0;
  return static_cast<std::int64_t>((20000 * num + den) / (2 * den));
}

inline std::string format_hundredths(std::int64_t v) {
  return fmt::format("{}{}.{:02d}", v < 0 ? "-" : "", std::abs(v) / 100, std::abs(v) % 100);
}

struct DiffCell {
  std::string cell;
  std::string paper_value;
  std::string computed_value;
  double delta = 0.0;
  bool pass = false;
  bool percentage = false;
};

struct ReproductionReport {
  TableId table;
  std::vector<DiffCell> cells;

  bool all_pass() const {
    return std::all_of(cells.begin(), cells.end(), [](const DiffCell& c) { return c.pass; });
  }
  std::size_t count(bool percentage_only, bool passed_only) const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [&](const DiffCell& c) {
      return (!percentage_only || c.percentage) && (!passed_only || c.pass);
    }));
  }
};

/// Tolerance for derived percentage cells, in percentage points.
inline constexpr double kPercentTolerance = 0.01;

/// Recomputes the four percentage columns and both rank orders from `counts`
/// and diffs them against the published table. Input counts that differ from
/// the bundled ones are reported as failing cells.
inline ReproductionReport reproduce_tables(const std::vector<MethodCounts>& counts,
                                           const BundledTable& bundled) {
  std::map<std::string, const MethodCounts*> by_name;
  for (const auto& c : counts) {
    if (!by_name.emplace(c.method, &c).second) {
      throw std::invalid_argument(fmt::format("duplicate method '{}' in counts", c.method));
    }
  }
  for (const auto& p : bundled.published) {
    if (!by_name.contains(p.method)) {
      throw std::invalid_argument(fmt::format("counts are missing method '{}' of table {}", p.method,
                                              to_string(bundled.id)));
    }
  }
  if (by_name.size() != bundled.published.size()) {
    for (const auto& c : counts) {
      const bool known = std::any_of(bundled.published.begin(), bundled.published.end(),
                                     [&](const PublishedRow& p) { return p.method == c.method; });
      if (!known) {
        throw std::invalid_argument(
            fmt::format("method '{}' is not part of table {}", c.method, to_string(bundled.id)));
      }
    }
  }

  ReproductionReport report{bundled.id, {}};
  auto add_count = [&](const std::string& cell, std::uint64_t published, std::uint64_t given) {
    report.cells.push_back({cell, std::to_string(published), std::to_string(given),
                            static_cast<double>(given) - static_cast<double>(published), published == given, false});
  };
  auto add_percent = [&](const std::string& cell, std::int64_t published, std::int64_t computed) {
    const double delta = static_cast<double>(computed - published) / 100.0;
    report.cells.push_back({cell, format_hundredths(published), format_hundredths(computed), delta,
                            std::abs(delta) <= kPercentTolerance + 1e-9, true});
  };
  auto add_rank = [&](const std::string& cell, std::size_t published, std::size_t computed) {
    report.cells.push_back({cell, std::to_string(published), std::to_string(computed),
                            static_cast<double>(computed) - static_cast<double>(published), published == computed, false});
  };

  std::map<std::string, const MethodCounts*> bundled_counts;
  for (const auto& c : bundled.counts) bundled_counts.emplace(c.method, &c);

  for (const auto& p : bundled.published) {
    const auto& c = *by_name.at(p.method);
    if (const auto it = bundled_counts.find(p.method); it != bundled_counts.end()) {
      add_count(p.method + ".ltp", it->second->ltp.value, c.ltp.value);
      add_count(p.method + ".lfp", it->second->lfp.value, c.lfp.value);
      add_count(p.method + ".lfn", it->second->lfn.value, c.lfn.value);
    }
    const auto tp = c.ltp.value;
    add_percent(p.method + ".lprecision", p.lprecision, percent_hundredths(tp, tp + c.lfp.value));
    add_percent(p.method + ".lrecall", p.lrecall, percent_hundredths(tp, tp + c.lfn.value));
    add_percent(p.method + ".lf1", p.lf1, percent_hundredths(2 * tp, 2 * tp + c.lfp.value + c.lfn.value));
    add_percent(p.method + ".lfiou", p.lfiou, percent_hundredths(tp, tp + c.lfp.value + c.lfn.value));
  }

  const auto records = to_records(counts);
  for (auto metric : {mpe::LmpMetric::Lf1, mpe::LmpMetric::LfIoU}) {
    std::map<std::string, std::size_t> computed;
    for (const auto& r : mpe::rank_methods(records, metric)) computed[r.name] = r.rank;
    for (const auto& p : bundled.published) {
      add_rank(fmt::format("{}.rank_{}", p.method, mpe::to_string(metric)), p.rank, computed.at(p.method));
    }
  }
  return report;
}

inline std::string to_tsv(const ReproductionReport& r) {
  std::string out = "cell\tpaper_value\tcomputed_value\tdelta\tpass\n";
  for (const auto& c : r.cells) {
    out += fmt::format("{}\t{}\t{}\t{:.2f}\t{}\n", c.cell, c.paper_value, c.computed_value, c.delta,
                       c.pass ? "true" : "false");
  }
  return out;
}

}  // namespace laf::synth
