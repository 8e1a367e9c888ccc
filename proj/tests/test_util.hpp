#pragma once

#include <random>

#include "gpsav/grid.hpp"

namespace gpsav::testing {

/// Complex field with independent uniform entries in the box [-amp, amp]^2.
inline Field random_field(const GridPtr& grid, unsigned seed, double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  Field f(grid);
  for (auto& z : f.data()) z = Complex(u(rng), u(rng));
  return f;
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace gpsav::testing
