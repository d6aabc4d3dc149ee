#pragma once

// Counter-based randomness. Every draw is a pure function of (seed, domain,
// key words, counter), so results do not depend on evaluation order or on the
// standard library's distribution implementations.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace sidla {

/// Separate key spaces for the independent random ingredients.
enum class Domain : std::uint64_t {
  Weight = 0x5745494748540001ULL,
  Aux = 0x4155580000000002ULL,
  Clock = 0x434c4f434b000003ULL,
  Coin = 0x434f494e00000004ULL,
  Choice = 0x43484f4943450005ULL,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_words(std::uint64_t seed, Domain domain, std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = mix64(seed ^ static_cast<std::uint64_t>(domain));
  std::uint64_t i = 0;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w + 0x632be59bd9b4e019ULL * ++i));
  return h;
}

/// Uniform in [0, 1) with 53 random bits.
constexpr double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Standard exponential by inversion; u == 0 maps to the smallest positive double.
inline double standard_exponential(double u) {
  const double e = -std::log1p(-u);
  return e > 0.0 ? e : std::numeric_limits<double>::denorm_min();
}

/// A reproducible stream of draws: the n-th draw hashes (seed, domain, stream, n).
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, Domain domain, std::uint64_t stream = 0)
      : seed_(seed), domain_(domain), stream_(stream) {}

  std::uint64_t next_bits() { return hash_words(seed_, domain_, {stream_, counter_++}); }

  double uniform() { return unit_from_bits(next_bits()); }

  double exponential(double rate) { return standard_exponential(uniform()) / rate; }

  bool coin() { return (next_bits() >> 63) != 0; }

  /// Uniform integer in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t r = next_bits();
    while (r >= limit) r = next_bits();
    return r % n;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  Domain domain_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace sidla
