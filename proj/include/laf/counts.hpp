#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "laf/engine.hpp"
#include "laf/mpe.hpp"

namespace laf {

/// One row of a `method,ltp,lfp,lfn` counts file.
struct MethodCounts {
  std::string method;
  PixelCount ltp;
  PixelCount lfp;
  PixelCount lfn;

  bool operator==(const MethodCounts&) const = default;
};

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line_no, const std::string& what)
      : std::runtime_error(fmt::format("line {}: {}", line_no, what)), line(line_no) {}

  std::size_t line;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Non-empty, non-comment lines with their 1-based line numbers. A trailing
/// '\r' is dropped.
inline std::vector<std::pair<std::size_t, std::string_view>> data_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(line_no, line);
  }
  return out;
}

inline std::uint64_t parse_u64(std::string_view s, std::size_t line_no, std::string_view field) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw CsvError(line_no, fmt::format("{} '{}' is not a non-negative integer", field, s));
  }
  return v;
}

}  // namespace detail

inline std::vector<MethodCounts> parse_counts_csv(std::string_view text) {
  const auto lines = detail::data_lines(text);
  if (lines.empty() || lines.front().second != "method,ltp,lfp,lfn") {
    throw CsvError(lines.empty() ? 1 : lines.front().first,
                   "expected header 'method,ltp,lfp,lfn'");
  }
  std::vector<MethodCounts> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [line_no, line] = lines[i];
    const auto cells = detail::split(line, ',');
    if (cells.size() != 4) throw CsvError(line_no, fmt::format("expected 4 fields, got {}", cells.size()));
    if (cells[0].empty()) throw CsvError(line_no, "empty method name");
    rows.push_back({std::string(cells[0]), {detail::parse_u64(cells[1], line_no, "ltp")},
                    {detail::parse_u64(cells[2], line_no, "lfp")},
                    {detail::parse_u64(cells[3], line_no, "lfn")}});
  }
  return rows;
}

inline std::vector<mpe::MethodRecord> to_records(const std::vector<MethodCounts>& counts) {
  std::vector<mpe::MethodRecord> out;
  out.reserve(counts.size());
  for (const auto& c : counts) out.push_back({c.method, make_report(c.ltp, c.lfp, c.lfn)});
  return out;
}

}  // namespace laf
