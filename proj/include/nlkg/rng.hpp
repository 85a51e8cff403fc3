// Seeded, label-addressed random streams.
//
// Algorithm identity (fixed, so outputs are reproducible across platforms):
//   key    = splitmix64(seed ^ fnv1a64(label))
//   x_i    = splitmix64_mix(key + (i + 1) * 0x9E3779B97F4A7C15)
//   double = (x_i >> 11) * 2^-53
// Draw i depends only on (seed, label, i), so independent streams can be
// consumed in any order or in parallel without changing results.

#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <string_view>

namespace nlkg {

std::uint64_t fnv1a64(std::string_view text) noexcept;
std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::string_view label);

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Uniform on [0, 1).
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller (one draw per call, two uniforms consumed).
  double normal() noexcept;
  std::complex<double> complex_normal() noexcept;

  // A derived stream whose key mixes in an index (e.g. a sample number).
  RandomStream substream(std::uint64_t index) const;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  RandomStream(std::uint64_t key, std::uint64_t counter, int) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_{0};
};

// seeded_rng(seed, stream_label)
RandomStream seeded_rng(std::uint64_t seed, std::string_view label);

}  // namespace nlkg
