#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <png.h>

#include "laf/file_io.hpp"
#include "laf/mask.hpp"

namespace laf {

enum class MaskFormat { Image, Rle };

inline constexpr int kDefaultThreshold = 128;
inline constexpr std::string_view kRleMagic = "LAFMASK1";

/// Malformed or unsupported mask file. `offset` is the byte position where
/// decoding stopped.
class MaskFormatError : public std::runtime_error {
 public:
  MaskFormatError(std::size_t off, std::string why)
      : std::runtime_error(fmt::format("{} (at byte {})", why, off)),
        offset(off),
        reason(std::move(why)) {}

  std::size_t offset;
  std::string reason;
};

namespace detail {

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

class RleCursor {
 public:
  explicit RleCursor(std::string_view text) : text_(text) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= text_.size(); }

  void expect(char c, std::string_view what) {
    if (at_end()) throw MaskFormatError(pos_, fmt::format("truncated payload: expected {}", what));
    if (text_[pos_] != c) throw MaskFormatError(pos_, fmt::format("malformed: expected {}", what));
    ++pos_;
  }

  std::uint64_t number(std::string_view what) {
    if (at_end()) throw MaskFormatError(pos_, fmt::format("truncated payload: expected {}", what));
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    while (!at_end() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      if (pos_ - start >= 19) throw MaskFormatError(start, fmt::format("{} too large", what));
      v = v * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) throw MaskFormatError(start, fmt::format("malformed: expected {}", what));
    return v;
  }

  char peek() const { return text_[pos_]; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

inline constexpr std::array<std::uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G',
                                                              0x0D, 0x0A, 0x1A, 0x0A};

inline std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

/// Walks the chunk structure so structural defects are reported with offsets
/// before libpng sees the data.
inline Dimensions check_png_structure(std::span<const std::uint8_t> bytes) {
  const std::size_t n = bytes.size();
  for (std::size_t i = 0; i < kPngSignature.size(); ++i) {
    if (i >= n) throw MaskFormatError(n, "truncated payload: incomplete PNG signature");
    if (bytes[i] != kPngSignature[i]) throw MaskFormatError(i, "malformed header: bad PNG signature");
  }
  if (n < 8 + 8 + 13 + 4) throw MaskFormatError(n, "truncated payload: incomplete IHDR chunk");
  if (std::memcmp(bytes.data() + 12, "IHDR", 4) != 0) {
    throw MaskFormatError(12, "malformed header: first chunk is not IHDR");
  }
  if (read_be32(bytes, 8) != 13) throw MaskFormatError(8, "malformed header: IHDR length is not 13");

  const Dimensions dims{read_be32(bytes, 16), read_be32(bytes, 20)};
  if (dims.width == 0) throw MaskFormatError(16, "zero width");
  if (dims.height == 0) throw MaskFormatError(20, "zero height");
  if (bytes[24] != 8) throw MaskFormatError(24, "unsupported PNG: bit depth must be 8");
  if (bytes[25] != 0) throw MaskFormatError(25, "unsupported PNG: colour type must be grayscale");

  std::size_t pos = 33;
  while (true) {
    if (pos + 8 > n) throw MaskFormatError(pos, "truncated payload: missing IEND chunk");
    const std::uint64_t len = read_be32(bytes, pos);
    if (pos + 12 + len > n) throw MaskFormatError(pos, "truncated payload: chunk extends past end");
    if (std::memcmp(bytes.data() + pos + 4, "IEND", 4) == 0) break;
    pos += 12 + len;
  }
  return dims;
}

}  // namespace detail

inline BinaryMask decode_rle(std::string_view text) {
  detail::RleCursor cur(text);
  for (char c : kRleMagic) cur.expect(c, "LAFMASK1 magic");
  cur.expect(' ', "space after magic");
  const std::size_t width_at = cur.pos();
  const auto width = cur.number("width");
  cur.expect(' ', "space after width");
  const std::size_t height_at = cur.pos();
  const auto height = cur.number("height");
  cur.expect('\n', "newline after header");
  if (width == 0) throw MaskFormatError(width_at, "zero width");
  if (height == 0) throw MaskFormatError(height_at, "zero height");
  if (width > UINT32_MAX) throw MaskFormatError(width_at, "width too large");
  if (height > UINT32_MAX) throw MaskFormatError(height_at, "height too large");

  BinaryMask mask(static_cast<std::uint32_t>(width), static_cast<std::uint32_t>(height));
  const std::uint64_t area = mask.area();
  std::uint64_t covered = 0;
  bool positive = false;
  for (std::size_t run_no = 0;; ++run_no) {
    const std::size_t run_at = cur.pos();
    const auto len = cur.number("run length");
    if (len == 0 && run_no != 0) throw MaskFormatError(run_at, "zero-length run");
    if (len > area - covered) throw MaskFormatError(run_at, "runs exceed width*height");
    if (positive) {
      for (std::uint64_t i = covered; i < covered + len; ++i) mask.set(i, true);
    }
    covered += len;
    positive = !positive;
    if (cur.at_end()) throw MaskFormatError(cur.pos(), "truncated payload: missing final newline");
    if (cur.peek() == '\n') break;
    cur.expect(' ', "space between runs");
  }
  const std::size_t end_at = cur.pos();
  if (covered != area) {
    throw MaskFormatError(end_at, fmt::format("truncated payload: runs cover {} of {} pixels",
                                              covered, area));
  }
  cur.expect('\n', "final newline");
  if (!cur.at_end()) throw MaskFormatError(cur.pos(), "trailing bytes after run line");
  return mask;
}

/// Canonical RLE text: runs alternate negative, positive, ... starting with a
/// negative run that is 0 when the first pixel is positive.
inline std::string encode_rle(const BinaryMask& mask) {
  std::string out = fmt::format("{} {} {}\n", kRleMagic, mask.width(), mask.height());
  bool current = false;
  std::uint64_t run = 0;
  bool first = true;
  auto flush = [&] {
    if (!first) out.push_back(' ');
    out += std::to_string(run);
    first = false;
  };
  for (std::uint64_t i = 0; i < mask.area(); ++i) {
    const bool v = mask.get(i);
    if (v != current) {
      flush();
      current = v;
      run = 0;
    }
    ++run;
  }
  flush();
  out.push_back('\n');
  return out;
}

/// Grayscale PNG from raw 8-bit values (row-major, width*height bytes).
inline std::vector<std::uint8_t> encode_gray_png(std::uint32_t width, std::uint32_t height,
                                                 std::span<const std::uint8_t> gray) {
  if (width == 0 || height == 0) throw std::invalid_argument("zero image dimension");
  if (gray.size() != std::size_t{width} * height) {
    throw std::invalid_argument(fmt::format("expected {} gray values, got {}",
                                            std::size_t{width} * height, gray.size()));
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = width;
  image.height = height;
  image.format = PNG_FORMAT_GRAY;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, gray.data(), 0, nullptr)) {
    throw std::runtime_error(fmt::format("png encode failed: {}", image.message));
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, gray.data(), 0, nullptr)) {
    throw std::runtime_error(fmt::format("png encode failed: {}", image.message));
  }
  out.resize(size);
  return out;
}

/// Raw 8-bit values of a grayscale PNG.
inline std::vector<std::uint8_t> decode_gray_png(std::span<const std::uint8_t> bytes,
                                                 Dimensions* dims_out = nullptr) {
  const Dimensions dims = detail::check_png_structure(bytes);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw MaskFormatError(8, fmt::format("malformed PNG: {}", image.message));
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> gray(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, gray.data(), 0, nullptr)) {
    png_image_free(&image);
    throw MaskFormatError(33, fmt::format("malformed PNG payload: {}", image.message));
  }
  if (dims_out != nullptr) *dims_out = dims;
  return gray;
}

inline BinaryMask decode_png(std::span<const std::uint8_t> bytes, int threshold = kDefaultThreshold) {
  if (threshold < 0 || threshold > 255) {
    throw std::invalid_argument(fmt::format("threshold {} outside [0, 255]", threshold));
  }
  Dimensions dims;
  const auto gray = decode_gray_png(bytes, &dims);
  BinaryMask mask(dims.width, dims.height);
  for (std::uint64_t i = 0; i < gray.size(); ++i) {
    if (gray[i] >= threshold) mask.set(i, true);
  }
  return mask;
}

inline std::vector<std::uint8_t> encode_png(const BinaryMask& mask) {
  std::vector<std::uint8_t> gray(mask.area(), 0);
  for (auto idx : mask.positives()) gray[idx] = 255;
  return encode_gray_png(mask.width(), mask.height(), gray);
}

inline std::optional<MaskFormat> detect_format(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= detail::kPngSignature.size() &&
      std::equal(detail::kPngSignature.begin(), detail::kPngSignature.end(), bytes.begin())) {
    return MaskFormat::Image;
  }
  if (bytes.size() >= kRleMagic.size() &&
      std::memcmp(bytes.data(), kRleMagic.data(), kRleMagic.size()) == 0) {
    return MaskFormat::Rle;
  }
  return std::nullopt;
}

/// Decodes either supported format, picked by the leading magic bytes.
inline BinaryMask decode_mask(std::span<const std::uint8_t> bytes,
                              int threshold = kDefaultThreshold) {
  if (threshold < 0 || threshold > 255) {
    throw std::invalid_argument(fmt::format("threshold {} outside [0, 255]", threshold));
  }
  const auto format = detect_format(bytes);
  if (!format) throw MaskFormatError(0, "malformed header: neither PNG nor LAFMASK1");
  if (*format == MaskFormat::Image) return decode_png(bytes, threshold);
  return decode_rle({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

inline BinaryMask decode_mask(std::string_view bytes, int threshold = kDefaultThreshold) {
  return decode_mask(detail::as_bytes(bytes), threshold);
}

inline std::vector<std::uint8_t> encode_mask(const BinaryMask& mask, MaskFormat format) {
  if (format == MaskFormat::Image) return encode_png(mask);
  const auto text = encode_rle(mask);
  return {text.begin(), text.end()};
}

inline BinaryMask read_mask_file(const std::filesystem::path& path,
                                 int threshold = kDefaultThreshold) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_mask(std::span<const std::uint8_t>(bytes), threshold);
  } catch (const MaskFormatError& e) {
    throw MaskFormatError(e.offset, fmt::format("{}: {}", path.string(), e.reason));
  }
}

}  // namespace laf
