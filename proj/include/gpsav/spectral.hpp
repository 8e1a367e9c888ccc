#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "gpsav/grid.hpp"

namespace gpsav {

/// Forward transform of `f` (unnormalized).
inline Field to_spectral(Field f) {
  f.grid().fft().forward(f.data());
  return f;
}

/// Inverse transform (carries the 1/N factor).
inline Field from_spectral(Field f) {
  f.grid().fft().inverse(f.data());
  return f;
}

namespace detail {

/// Multiplies spectral coefficients by a per-axis symbol, in place.
template <typename Symbol>
void scale_along_axis(std::span<Complex> coeffs, const Grid& g, int axis,
                      const std::vector<Symbol>& symbol) {
  const auto n = g.sizes();
  for (std::size_t k = 0; k < n[2]; ++k)
    for (std::size_t j = 0; j < n[1]; ++j)
      for (std::size_t i = 0; i < n[0]; ++i) {
        const std::size_t p = axis == 0 ? i : (axis == 1 ? j : k);
        coeffs[g.flat_index(i, j, k)] *= symbol[p];
      }
}

}  // namespace detail

/// Pseudo-spectral derivative of order 1 or 2 along `axis`.
inline Field deriv(const Field& field, int axis, int order) {
  const Grid& g = field.grid();
  if (axis < 0 || axis >= g.dim()) throw InvalidArgument("deriv: axis out of range");
  if (order != 1 && order != 2) throw InvalidArgument("deriv: order must be 1 or 2");
  Field out = to_spectral(field);
  if (order == 1)
    detail::scale_along_axis(out.data(), g, axis, g.eig1(axis));
  else
    detail::scale_along_axis(out.data(), g, axis, g.eig2(axis));
  return from_spectral(std::move(out));
}

/// Sum of second derivatives over the active axes.
inline Field laplacian(const Field& field) {
  Field out = to_spectral(field);
  const auto& sym = field.grid().laplacian_symbol();
  auto d = out.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= sym[i];
  return from_spectral(std::move(out));
}

/// Discrete inner product <u, v>_h = h1 h2 h3 sum u conj(v).
inline Complex inner(const Field& u, const Field& v) {
  u.require_same_grid(v);
  Complex acc{0.0, 0.0};
  auto a = u.data();
  auto b = v.data();
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
  return acc * u.grid().cell_volume();
}

inline double norm_h(const Field& u) {
  double acc = 0.0;
  for (const auto& z : u.data()) acc += std::norm(z);
  return std::sqrt(acc * u.grid().cell_volume());
}

/// max_j |u_j| (no volume weight).
inline double norm_inf(const Field& u) {
  double m = 0.0;
  for (const auto& z : u.data()) m = std::max(m, std::abs(z));
  return m;
}

/// (h1 h2 h3 sum |u_j|^p)^(1/p).
inline double norm_p(const Field& u, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("norm_p: p must be >= 1");
  double acc = 0.0;
  for (const auto& z : u.data()) acc += std::pow(std::abs(z), p);
  return std::pow(acc * u.grid().cell_volume(), 1.0 / p);
}

/// h1 h2 h3 sum |u_j|^4, i.e. ||u||_{4,h}^4 without the root.
inline double quartic_integral(const Field& u) {
  double acc = 0.0;
  for (const auto& z : u.data()) {
    const double m = std::norm(z);
    acc += m * m;
  }
  return acc * u.grid().cell_volume();
}

}  // namespace gpsav
