#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace laf {

/// Exact count of pixels. Never produced by floating-point arithmetic.
struct PixelCount {
  std::uint64_t value = 0;

  constexpr auto operator<=>(const PixelCount&) const = default;
  constexpr PixelCount operator+(PixelCount o) const { return {value + o.value}; }
};

struct Dimensions {
  std::uint32_t width = 0;
  std::uint32_t height = 0;

  constexpr bool operator==(const Dimensions&) const = default;
  constexpr std::uint64_t area() const { return std::uint64_t{width} * height; }
};

inline std::string to_string(Dimensions d) { return fmt::format("{}x{}", d.width, d.height); }

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(Dimensions a, Dimensions b)
      : std::invalid_argument(
            fmt::format("dimension mismatch: {} vs {}", to_string(a), to_string(b))),
        first(a), second(b) {}

  Dimensions first;
  Dimensions second;
};

enum class Region { Positive, Negative };

/// Binary raster mask stored as a packed bitset, one 64-bit word run per row.
///
/// Pixels are addressed row-major with the origin at the top-left, so pixel
/// (x, y) has index y * width + x. Bits past `width` in the last word of each
/// row are always zero.
class BinaryMask {
 public:
  using Word = std::uint64_t;
  static constexpr std::uint32_t kWordBits = 64;

  BinaryMask(std::uint32_t width, std::uint32_t height) : dims_{width, height} {
    if (width == 0 || height == 0) {
      throw std::invalid_argument(
          fmt::format("mask dimensions must be positive, got {}", to_string(dims_)));
    }
    words_per_row_ = (width + kWordBits - 1) / kWordBits;
    words_.assign(std::size_t{words_per_row_} * height, 0);
  }

  static BinaryMask full(std::uint32_t width, std::uint32_t height) {
    BinaryMask m(width, height);
    for (std::uint32_t y = 0; y < height; ++y) {
      auto row = m.row_words(y);
      std::fill(row.begin(), row.end(), ~Word{0});
      row.back() &= m.tail_mask();
    }
    return m;
  }

  static BinaryMask from_indices(std::uint32_t width, std::uint32_t height,
                                 std::span<const std::uint64_t> positives) {
    BinaryMask m(width, height);
    for (auto idx : positives) {
      if (idx >= m.area()) {
        throw std::out_of_range(fmt::format("pixel index {} outside {} mask", idx,
                                            to_string(m.dims_)));
      }
      m.set(idx, true);
    }
    return m;
  }

  Dimensions dimensions() const { return dims_; }
  std::uint32_t width() const { return dims_.width; }
  std::uint32_t height() const { return dims_.height; }
  std::uint64_t area() const { return dims_.area(); }
  std::uint32_t words_per_row() const { return words_per_row_; }

  bool get(std::uint32_t x, std::uint32_t y) const {
    return (words_[word_index(x, y)] >> (x % kWordBits)) & 1U;
  }
  bool get(std::uint64_t index) const {
    return get(static_cast<std::uint32_t>(index % dims_.width),
               static_cast<std::uint32_t>(index / dims_.width));
  }

  void set(std::uint32_t x, std::uint32_t y, bool value) {
    const Word bit = Word{1} << (x % kWordBits);
    auto& w = words_[word_index(x, y)];
    w = value ? (w | bit) : (w & ~bit);
  }
  void set(std::uint64_t index, bool value) {
    set(static_cast<std::uint32_t>(index % dims_.width),
        static_cast<std::uint32_t>(index / dims_.width), value);
  }

  std::span<const Word> row_words(std::uint32_t y) const {
    return {words_.data() + std::size_t{y} * words_per_row_, words_per_row_};
  }
  std::span<Word> row_words(std::uint32_t y) {
    return {words_.data() + std::size_t{y} * words_per_row_, words_per_row_};
  }

  /// Valid-bit mask for the last word of every row.
  Word tail_mask() const {
    const auto rem = dims_.width % kWordBits;
    return rem == 0 ? ~Word{0} : (Word{1} << rem) - 1;
  }

  PixelCount positive_count() const {
    std::uint64_t n = 0;
    for (auto w : words_) n += static_cast<std::uint64_t>(std::popcount(w));
    return {n};
  }
  PixelCount negative_count() const { return {area() - positive_count().value}; }

  /// Positive pixel indices in ascending row-major order.
  std::vector<std::uint64_t> positives() const {
    std::vector<std::uint64_t> out;
    out.reserve(positive_count().value);
    for (std::uint32_t y = 0; y < dims_.height; ++y) {
      const auto row = row_words(y);
      for (std::uint32_t wi = 0; wi < words_per_row_; ++wi) {
        Word w = row[wi];
        while (w != 0) {
          const auto bit = static_cast<std::uint32_t>(std::countr_zero(w));
          out.push_back(std::uint64_t{y} * dims_.width + wi * kWordBits + bit);
          w &= w - 1;
        }
      }
    }
    return out;
  }

  BinaryMask complement() const {
    BinaryMask out(*this);
    for (std::uint32_t y = 0; y < dims_.height; ++y) {
      auto row = out.row_words(y);
      for (auto& w : row) w = ~w;
      row.back() &= tail_mask();
    }
    return out;
  }

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t word_index(std::uint32_t x, std::uint32_t y) const {
    return std::size_t{y} * words_per_row_ + x / kWordBits;
  }

  Dimensions dims_;
  std::uint32_t words_per_row_ = 0;
  std::vector<Word> words_;
};

inline void require_same_dimensions(const BinaryMask& a, const BinaryMask& b) {
  if (a.dimensions() != b.dimensions()) throw DimensionMismatch(a.dimensions(), b.dimensions());
}

/// Rows per tile for the streaming count kernels.
inline constexpr std::uint32_t kTileRows = 64;

/// |region(a) ∩ region(b)|, accumulated tile by tile over row blocks.
inline PixelCount region_count(const BinaryMask& a, Region ra, const BinaryMask& b, Region rb) {
  require_same_dimensions(a, b);
  using Word = BinaryMask::Word;
  const Word flip_a = ra == Region::Negative ? ~Word{0} : 0;
  const Word flip_b = rb == Region::Negative ? ~Word{0} : 0;
  const Word tail = a.tail_mask();
  const std::uint32_t wpr = a.words_per_row();

  std::uint64_t total = 0;
  for (std::uint32_t tile = 0; tile < a.height(); tile += kTileRows) {
    const std::uint32_t end = std::min(a.height(), tile + kTileRows);
    std::uint64_t tile_sum = 0;
    for (std::uint32_t y = tile; y < end; ++y) {
      const auto ra_row = a.row_words(y);
      const auto rb_row = b.row_words(y);
      for (std::uint32_t i = 0; i + 1 < wpr; ++i) {
        tile_sum += static_cast<std::uint64_t>(
            std::popcount((ra_row[i] ^ flip_a) & (rb_row[i] ^ flip_b)));
      }
      tile_sum += static_cast<std::uint64_t>(
          std::popcount((ra_row[wpr - 1] ^ flip_a) & (rb_row[wpr - 1] ^ flip_b) & tail));
    }
    total += tile_sum;
  }
  return {total};
}

/// |positives(a) ∩ positives(b)|
inline PixelCount intersect_positive_count(const BinaryMask& a, const BinaryMask& b) {
  return region_count(a, Region::Positive, b, Region::Positive);
}

/// |positives(a) ∩ negatives(b)|
inline PixelCount intersect_pos_neg_count(const BinaryMask& a, const BinaryMask& b) {
  return region_count(a, Region::Positive, b, Region::Negative);
}

}  // namespace laf
