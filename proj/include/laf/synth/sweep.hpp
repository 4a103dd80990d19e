#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "laf/engine.hpp"
#include "laf/mpe.hpp"
#include "laf/synth/generate.hpp"

namespace laf::synth {

struct NoiseLevel {
  double fp_rate = 0.0;
  double fn_rate = 0.0;
};

/// `count` levels with fp_rate = fn_rate rising linearly from 0 to `max_rate`.
inline std::vector<NoiseLevel> linear_noise_levels(std::size_t count, double max_rate) {
  std::vector<NoiseLevel> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double r = count == 1 ? 0.0 : max_rate * static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back({r, r});
  }
  return out;
}

/// Spearman rank correlation with average ranks for ties. Empty when either
/// series is constant, since the correlation is then undefined.
inline std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman needs two equal series of length >= 2");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0.0;
  double va = 0.0;
  double vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return std::nullopt;
  return cov / std::sqrt(va * vb);
}

struct SweepPoint {
  NoiseLevel level;
  TrueConfusion confusion;
  LamReport lam;
  double true_f1 = 0.0;
};

struct SweepReport {
  SynthParams base;
  mpe::LmpMetric metric = mpe::LmpMetric::Lf1;
  std::vector<SweepPoint> points;
  std::optional<double> spearman_lf1;
  std::optional<double> spearman_lfiou;

  /// Correlation for the selected metric; empty means degenerate.
  std::optional<double> correlation() const {
    return metric == mpe::LmpMetric::Lf1 ? spearman_lf1 : spearman_lfiou;
  }
  bool degenerate() const { return !correlation().has_value(); }
};

/// One truth mask and target pair from `base`; one flip-noise prediction per
/// level, each drawn from its own stream (index = level position), so the
/// result is identical for any `threads`.
inline SweepReport run_band_sweep(const SynthParams& base, const std::vector<NoiseLevel>& levels,
                                  mpe::LmpMetric metric, unsigned threads = 1) {
  if (levels.size() < 2) throw std::invalid_argument("a sweep needs at least two noise levels");
  const BinaryMask truth = gen_true_mask(base);
  const InaccurateTargetSet targets = derive_targets(truth, base.dilate_radius, base.erode_radius);
  const LafConfig config = LafConfig::tsfbc();

  SweepReport report{base, metric, std::vector<SweepPoint>(levels.size()), {}, {}};
  auto run_point = [&](std::size_t i) {
    const auto& lv = levels[i];
    const auto pred = gen_prediction(truth, lv.fp_rate, lv.fn_rate, derive_seed(base.seed, Stream::SweepPoint, i));
    auto& pt = report.points[i];
    pt.level = lv;
    pt.confusion = true_confusion(pred, truth);
    pt.true_f1 = pt.confusion.f1();
    pt.lam = evaluate(pred, targets, config);
  };

  if (threads <= 1) {
    for (std::size_t i = 0; i < levels.size(); ++i) run_point(i);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned t = 0; t < threads; ++t) {
      jobs.push_back(std::async(std::launch::async, [&, t] {
        for (std::size_t i = t; i < levels.size(); i += threads) run_point(i);
      }));
    }
    for (auto& j : jobs) j.get();
  }

  std::vector<double> f1s, lf1s, lfious;
  for (const auto& p : report.points) {
    f1s.push_back(p.true_f1);
    lf1s.push_back(p.lam.lf1);
    lfious.push_back(p.lam.lfiou);
  }
  report.spearman_lf1 = spearman(lf1s, f1s);
  report.spearman_lfiou = spearman(lfious, f1s);
  return report;
}

inline std::string to_json(const SweepReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string("null"); };
  std::string out = "{\"points\":[";
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto& p = r.points[i];
    out += fmt::format("{}{{\"fp_rate\":{},\"fn_rate\":{},\"true_f1\":{},\"lf1\":{},\"lfiou\":{}}}",
                       i == 0 ? "" : ",", p.level.fp_rate, p.level.fn_rate, p.true_f1, p.lam.lf1,
                       p.lam.lfiou);
  }
  out += fmt::format(
      "],\"summary\":{{\"metric\":\"{}\",\"levels\":{},\"seed\":{},\"dilate_radius\":{},"
      "\"erode_radius\":{},\"band_width\":{},\"spearman_lf1\":{},\"spearman_lfiou\":{},"
      "\"correlation\":{},\"degenerate\":{}}}}}\n",
      mpe::to_string(r.metric), r.points.size(), r.base.seed, r.base.dilate_radius,
      r.base.erode_radius, r.base.dilate_radius + r.base.erode_radius, opt(r.spearman_lf1),
      opt(r.spearman_lfiou), opt(r.correlation()), r.degenerate());
  return out;
}

}  // namespace laf::synth
