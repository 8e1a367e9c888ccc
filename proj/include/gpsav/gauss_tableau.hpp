#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "gpsav/error.hpp"

namespace gpsav {

/// Runge-Kutta coefficients; `a` is row-major s x s.
struct ButcherTableau {
  int s = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;

  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * s + j)]; }
};

inline constexpr int kMaxStages = 5;

namespace detail {

/// Legendre P_n(x) and P_n'(x) on [-1, 1] by the three-term recurrence.
inline std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace detail

/// s-stage Gauss collocation method (order 2s), 1 <= s <= 5.
///
/// Nodes are roots of the shifted Legendre polynomial found by Newton from
/// Chebyshev guesses; b are the Gauss-Legendre weights and
/// a_ij = int_0^{c_i} l_j(t) dt, integrated exactly by the same s-point rule
/// mapped onto [0, c_i] (l_j has degree s - 1).
inline ButcherTableau gauss_tableau(int s) {
  if (s < 1 || s > kMaxStages) throw InvalidArgument("gauss_tableau: s must be in [1, 5]");
  ButcherTableau t;
  t.s = s;
  t.a.assign(static_cast<std::size_t>(s * s), 0.0);
  t.b.resize(s);
  t.c.resize(s);

  std::vector<double> x(s);
  std::vector<double> w(s);
  for (int i = 0; i < s; ++i) {
    double r = -std::cos(std::numbers::pi * (i + 0.75) / (s + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre(s, r);
      const double dr = p / dp;
      r -= dr;
      if (std::abs(dr) < 1e-16) break;
    }
    const auto [p, dp] = detail::legendre(s, r);
    (void)p;
    x[i] = r;
    w[i] = 2.0 / ((1.0 - r * r) * dp * dp);
  }
  // Symmetrize: Gauss nodes are symmetric about 0; pair them up exactly.
  for (int i = 0; i < s / 2; ++i) {
    const int j = s - 1 - i;
    const double r = 0.5 * (x[j] - x[i]);
    const double wm = 0.5 * (w[i] + w[j]);
    x[i] = -r;
    x[j] = r;
    w[i] = w[j] = wm;
  }
  if (s % 2 == 1) x[s / 2] = 0.0;
  for (int i = 0; i < s; ++i) {
    t.c[i] = 0.5 * (1.0 + x[i]);
    t.b[i] = 0.5 * w[i];
  }

  auto lagrange = [&](int j, double tau) {
    double v = 1.0;
    for (int m = 0; m < s; ++m)
      if (m != j) v *= (tau - t.c[m]) / (t.c[j] - t.c[m]);
    return v;
  };
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      double acc = 0.0;
      for (int k = 0; k < s; ++k) acc += t.b[k] * lagrange(j, t.c[i] * t.c[k]);
      t.a[static_cast<std::size_t>(i * s + j)] = t.c[i] * acc;
    }
  return t;
}

struct OrderConditionReport {
  /// max_k |sum_i b_i c_i^{k-1} - 1/k| over k = 1..2s
  double quadrature_residual = 0.0;
  /// max_{i,k} |sum_j a_ij c_j^{k-1} - c_i^k / k| over k = 1..s
  double stage_residual = 0.0;
  /// max_{i,j} |b_i a_ij + b_j a_ji - b_i b_j|
  double symplectic_residual = 0.0;
  double max_residual = 0.0;

  bool passed(double tol = 1e-13) const { return max_residual <= tol; }
};

/// Checks B(2s), C(s) and the symplecticity condition.
inline OrderConditionReport verify_order_conditions(const ButcherTableau& t) {
  OrderConditionReport r;
  const int s = t.s;
  for (int k = 1; k <= 2 * s; ++k) {
    double acc = 0.0;
    for (int i = 0; i < s; ++i) acc += t.b[i] * std::pow(t.c[i], k - 1);
    r.quadrature_residual = std::max(r.quadrature_residual, std::abs(acc - 1.0 / k));
  }
  for (int i = 0; i < s; ++i)
    for (int k = 1; k <= s; ++k) {
      double acc = 0.0;
      for (int j = 0; j < s; ++j) acc += t(i, j) * std::pow(t.c[j], k - 1);
      r.stage_residual = std::max(r.stage_residual, std::abs(acc - std::pow(t.c[i], k) / k));
    }
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      r.symplectic_residual = std::max(
          r.symplectic_residual, std::abs(t.b[i] * t(i, j) + t.b[j] * t(j, i) - t.b[i] * t.b[j]));
  r.max_residual = std::max({r.quadrature_residual, r.stage_residual, r.symplectic_residual});
  return r;
}

}  // namespace gpsav
