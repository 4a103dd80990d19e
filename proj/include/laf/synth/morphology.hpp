#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "laf/mask.hpp"

namespace laf::synth {

/// Half-width of a digital disc of radius r at row offset dy: the largest h
/// with h*h + dy*dy <= r*r.
inline std::uint32_t disc_half_width(std::uint32_t r, std::uint32_t dy) {
  const std::uint64_t rem = std::uint64_t{r} * r - std::uint64_t{dy} * dy;
  std::uint64_t h = 0;
  while ((h + 1) * (h + 1) <= rem) ++h;
  return static_cast<std::uint32_t>(h);
}

namespace detail {

using Word = BinaryMask::Word;

// One-pixel horizontal dilation of a row, in place. Bits past the row width
// are cleared by the caller.
inline void grow_row_by_one(std::vector<Word>& row, std::vector<Word>& scratch) {
  const std::size_t n = row.size();
  scratch = row;
  for (std::size_t i = 0; i < n; ++i) {
    Word left = scratch[i] << 1;
    if (i > 0) left |= scratch[i - 1] >> 63;
    Word right = scratch[i] >> 1;
    if (i + 1 < n) right |= scratch[i + 1] << 63;
    row[i] |= left | right;
  }
}

}  // namespace detail

/// Binary dilation by a disc of radius r. Pixels outside the canvas are
/// never positive.
inline BinaryMask dilate(const BinaryMask& mask, std::uint32_t r) {
  if (r == 0) return mask;
  const std::uint32_t w = mask.width();
  const std::uint32_t h = mask.height();
  const auto tail = mask.tail_mask();

  std::vector<std::uint32_t> half(r + 1);
  for (std::uint32_t dy = 0; dy <= r; ++dy) half[dy] = disc_half_width(r, dy);

  BinaryMask out(w, h);
  // grown[k] is the source row dilated horizontally by k pixels.
  std::vector<std::vector<detail::Word>> grown(r + 1);
  std::vector<detail::Word> scratch;
  for (std::uint32_t y = 0; y < h; ++y) {
    const auto src = mask.row_words(y);
    bool any = false;
    for (auto word : src) any = any || word != 0;
    if (!any) continue;

    grown[0].assign(src.begin(), src.end());
    for (std::uint32_t k = 1; k <= r; ++k) {
      grown[k] = grown[k - 1];
      detail::grow_row_by_one(grown[k], scratch);
      grown[k].back() &= tail;
    }
    const std::int64_t lo = std::max<std::int64_t>(0, std::int64_t{y} - r);
    const std::int64_t hi = std::min<std::int64_t>(h - 1, std::int64_t{y} + r);
    for (std::int64_t ty = lo; ty <= hi; ++ty) {
      const auto dy = static_cast<std::uint32_t>(ty > y ? ty - y : y - ty);
      const auto& g = grown[half[dy]];
      auto dst = out.row_words(static_cast<std::uint32_t>(ty));
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= g[i];
    }
  }
  return out;
}

/// Binary erosion by a disc of radius r. Only in-canvas neighbours are
/// consulted, so erosion is the dual of dilation: erode(m) = ~dilate(~m).
inline BinaryMask erode(const BinaryMask& mask, std::uint32_t r) {
  if (r == 0) return mask;
  return dilate(mask.complement(), r).complement();
}

}  // namespace laf::synth
