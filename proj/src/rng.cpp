#include "nlkg/rng.hpp"

#include <cmath>
#include <numbers>

namespace nlkg {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::string_view label)
    : key_(splitmix64_mix(seed ^ fnv1a64(label))) {}

RandomStream::result_type RandomStream::operator()() noexcept {
  ++counter_;
  return splitmix64_mix(key_ + counter_ * kGolden);
}

double RandomStream::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() noexcept {
  // 1 - u lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> RandomStream::complex_normal() noexcept {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

RandomStream RandomStream::substream(std::uint64_t index) const {
  return RandomStream(splitmix64_mix(key_ ^ splitmix64_mix(index + kGolden)), 0, 0);
}

RandomStream seeded_rng(std::uint64_t seed, std::string_view label) {
  return RandomStream(seed, label);
}

}  // namespace nlkg
