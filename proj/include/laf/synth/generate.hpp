#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <json.hpp>

#include "laf/engine.hpp"
#include "laf/mask.hpp"
#include "laf/synth/morphology.hpp"
#include "laf/synth/rng.hpp"

namespace laf::synth {

struct SynthParams {
  std::uint32_t width = 64;
  std::uint32_t height = 64;
  std::uint32_t blob_count = 3;
  std::uint32_t blob_radius = 5;
  std::uint64_t seed = 0;
  std::uint32_t dilate_radius = 0;  // high-recall band
  std::uint32_t erode_radius = 0;   // high-precision band
  double fp_rate = 0.0;
  double fn_rate = 0.0;

  void validate() const {
    if (width == 0 || height == 0) throw std::invalid_argument("synth canvas must be non-empty");
    auto rate = [](double v, const char* what) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(fmt::format("{} {} outside [0, 1]", what, v));
    };
    rate(fp_rate, "fp_rate");
    rate(fn_rate, "fn_rate");
  }
};

/// Reads the flat JSON form; absent fields keep their defaults, unknown
/// fields are rejected.
inline SynthParams params_from_json(const nlohmann::json& j,
                                    std::initializer_list<std::string_view> extra_keys = {}) {
  if (!j.is_object()) throw std::invalid_argument("synth config must be a JSON object");
  SynthParams p;
  for (const auto& [key, value] : j.items()) {
    auto u32 = [&](std::uint32_t& out) {
      if (!value.is_number_unsigned() || value.get<std::uint64_t>() > UINT32_MAX) {
        throw std::invalid_argument(fmt::format("'{}' must be a non-negative 32-bit integer", key));
      }
      out = value.get<std::uint32_t>();
    };
    auto real = [&](double& out) {
      if (!value.is_number()) throw std::invalid_argument(fmt::format("'{}' must be a number", key));
      out = value.get<double>();
    };
    if (key == "width") u32(p.width);
    else if (key == "height") u32(p.height);
    else if (key == "blob_count") u32(p.blob_count);
    else if (key == "blob_radius") u32(p.blob_radius);
    else if (key == "dilate_radius") u32(p.dilate_radius);
    else if (key == "erode_radius") u32(p.erode_radius);
    else if (key == "fp_rate") real(p.fp_rate);
    else if (key == "fn_rate") real(p.fn_rate);
    else if (key == "seed") {
      if (!value.is_number_unsigned()) throw std::invalid_argument("'seed' must be a non-negative integer");
      p.seed = value.get<std::uint64_t>();
    } else if (std::find(extra_keys.begin(), extra_keys.end(), key) == extra_keys.end()) {
      throw std::invalid_argument(fmt::format("unknown synth config field '{}'", key));
    }
  }
  p.validate();
  return p;
}

/// Union of `blob_count` discs of radius `blob_radius` whose centres are
/// drawn so every disc lies inside the canvas.
inline BinaryMask gen_true_mask(const SynthParams& params) {
  params.validate();
  BinaryMask mask(params.width, params.height);
  if (params.blob_count == 0) return mask;

  const std::uint64_t r = params.blob_radius;
  if (2 * r + 1 > params.width || 2 * r + 1 > params.height) {
    throw std::invalid_argument(fmt::format("canvas {}x{} too small for blobs of radius {}",
                                            params.width, params.height, r));
  }
  Rng rng(derive_seed(params.seed, Stream::TrueMask, 0));
  for (std::uint32_t b = 0; b < params.blob_count; ++b) {
    const auto cx = static_cast<std::uint32_t>(r + rng.below(params.width - 2 * r));
    const auto cy = static_cast<std::uint32_t>(r + rng.below(params.height - 2 * r));
    for (std::uint32_t dy = 0; dy <= r; ++dy) {
      const std::uint32_t hw = disc_half_width(static_cast<std::uint32_t>(r), dy);
      for (std::uint32_t x = cx - hw; x <= cx + hw; ++x) {
        mask.set(x, cy - dy, true);
        mask.set(x, cy + dy, true);
      }
    }
  }
  return mask;
}

/// High-recall target = dilation by r1 (superset of the truth), high-precision
/// target = erosion by r2 (subset of the truth).
inline InaccurateTargetSet derive_targets(const BinaryMask& truth, std::uint32_t r1, std::uint32_t r2) {
  return InaccurateTargetSet{{dilate(truth, r1), TargetRole::HighRecall},
                             {erode(truth, r2), TargetRole::HighPrecision}};
}

/// Independent per-pixel flip noise. One uniform draw per pixel in row-major
/// order: a true positive survives unless u < fn_rate, a true negative flips
/// when u < fp_rate.
inline BinaryMask gen_prediction(const BinaryMask& truth, double fp_rate, double fn_rate,
                                 std::uint64_t seed) {
  for (double v : {fp_rate, fn_rate}) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(fmt::format("flip rate {} outside [0, 1]", v));
  }
  Rng rng(derive_seed(seed, Stream::Prediction, 0));
  BinaryMask out(truth.width(), truth.height());
  for (std::uint64_t i = 0; i < truth.area(); ++i) {
    const double u = rng.uniform();
    const bool positive = truth.get(i) ? !(u < fn_rate) : (u < fp_rate);
    if (positive) out.set(i, true);
  }
  return out;
}

struct TrueConfusion {
  PixelCount tp;
  PixelCount fp;
  PixelCount fn;
  PixelCount tn;

  bool operator==(const TrueConfusion&) const = default;

  /// 2TP / (2TP + FP + FN); 0 when nothing is positive in either mask.
  double f1() const {
    const auto den = 2 * tp.value + fp.value + fn.value;
    return den == 0 ? 0.0 : 2.0 * static_cast<double>(tp.value) / static_cast<double>(den);
  }
};

inline TrueConfusion true_confusion(const BinaryMask& prediction, const BinaryMask& truth) {
  require_same_dimensions(prediction, truth);
  return {region_count(prediction, Region::Positive, truth, Region::Positive),
          region_count(prediction, Region::Positive, truth, Region::Negative),
          region_count(prediction, Region::Negative, truth, Region::Positive),
          region_count(prediction, Region::Negative, truth, Region::Negative)};
}

}  // namespace laf::synth
