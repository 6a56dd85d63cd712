#pragma once

// Seeded sampling helpers. The draws are implemented here on top of the raw
// 64-bit engine output so traces do not depend on the standard library's
// distribution implementations.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pts/probability.hpp"

namespace pts {

using Rng = std::mt19937_64;

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform on {0, ..., n-1}, unbiased by rejection.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw std::domain_error("uniform_index over an empty range");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t v = rng();
    if (v < limit) return static_cast<std::size_t>(v % bound);
  }
}

/// Inverse-CDF draw from a categorical distribution.
inline std::size_t sample_categorical(Rng& rng, const Distribution& d) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    acc += d[i];
    if (u < acc) return i;
  }
  return d.size() - 1;
}

/// Uniform point on the simplex (flat Dirichlet) via normalized exponentials.
inline std::vector<double> sample_simplex_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& v : w) v = -std::log(1.0 - uniform01(rng));
  return w;
}

/// Uniform distribution on the simplex whose entries all exceed `min_entry`.
inline Distribution sample_distribution(Rng& rng, std::size_t n, double min_entry = 0.01) {
  if (min_entry * static_cast<double>(n) >= 1.0) throw std::domain_error("min_entry too large for the answer space");
  auto w = sample_simplex_weights(rng, n);
  double total = 0.0;
  for (double v : w) total += v;
  const double scale = 1.0 - min_entry * static_cast<double>(n);
  for (auto& v : w) v = min_entry + scale * v / total;
  return Distribution::from_weights(w);
}

}  // namespace pts
