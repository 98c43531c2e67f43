#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace suskit {

/// Counter-based splittable RNG (SplitMix64 core). Each stream is
/// identified by (seed, stream); advancing one stream never touches
/// another, so parallel replicates stay reproducible regardless of
/// scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform in (0,1]: never returns 0, so logs are safe.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform in [0,1).
  double next_unit_half_open() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Lemire-style rejection to kill modulo bias.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return next_unit_half_open() < p; }

  /// Exact Poisson sample, O(mean). Knuth inversion for small means;
  /// larger means are reduced by gamma splitting: if the m-th arrival
  /// time G = Gamma(m,1) lands before `mean`, count m events and
  /// recurse on the remainder, else the count is Binomial(m-1, mean/G)
  /// by the order-statistics property of arrival times.
  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 30.0) {
      const auto m = static_cast<std::uint64_t>(mean * 0.875);
      const double g = gamma_shape_int(m);
      if (g > mean) return total + binomial_from_uniforms(m - 1, mean / g);
      total += m;
      mean -= g;
    }
    const double limit = std::exp(-mean);
    double prod = next_unit();
    std::uint64_t k = 0;
    while (prod > limit) {
      prod *= next_unit();
      ++k;
    }
    return total + k;
  }

  /// Geometric skip for streaming Bernoulli(p) trials: returns the
  /// number of failures before the next success (may be huge).
  std::uint64_t geometric_skip(double p) {
    if (p >= 1.0) return 0;
    const double u = next_unit();
    const double s = std::log(u) / std::log1p(-p);
    if (s >= 9.0e18) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(s);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Sum of m unit exponentials.
  double gamma_shape_int(std::uint64_t m) {
    double acc = 0.0;
    for (std::uint64_t i = 0; i < m; ++i) acc += -std::log(next_unit());
    return acc;
  }

  /// Binomial(n, p) by direct trials.
  std::uint64_t binomial_from_uniforms(std::uint64_t n, double p) {
    std::uint64_t c = 0;
    for (std::uint64_t i = 0; i < n; ++i) c += bernoulli(p) ? 1 : 0;
    return c;
  }

  std::uint64_t state_;
};

/// Stream id for replicate `rep` of experiment seed `seed`.
inline Rng replicate_rng(std::uint64_t seed, std::uint64_t rep) {
  return Rng(seed, rep);
}

}  // namespace suskit
