#pragma once

#include <cstdint>
#include <random>

namespace laf::synth {

// Every random draw comes from std::mt19937_64 seeded through derive_seed().
// Each consumer owns a stream tag, and sweep points additionally own an index,
// so results do not depend on evaluation order or thread count.
//
//   mix(z)                   = splitmix64 output function
//   derive_seed(s, tag, i)   = mix(s ^ mix(tag * 0x9E3779B97F4A7C15 + i))
//   uniform()                = (next() >> 11) * 2^-53        in [0, 1)
//   below(n)                 = floor(uniform() * n)          in [0, n)

enum class Stream : std::uint64_t {
  TrueMask = 1,
  Prediction = 2,
  SweepPoint = 3,
};

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index) {
  return mix(seed ^ mix(static_cast<std::uint64_t>(stream) * kGolden + index));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace laf::synth
