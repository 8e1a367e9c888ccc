#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "gpsav/error.hpp"
#include "gpsav/grid.hpp"
#include "gpsav/snapshot.hpp"
#include "gpsav/spectral.hpp"

namespace gpsav {

enum class PotentialKind { harmonic, from_file };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::harmonic;
  /// Per-axis trap frequencies; V = scale * sum_w gamma_w^2 x_w^2 / 2.
  std::array<double, 3> gammas{1.0, 1.0, 1.0};
  double scale = 1.0;
  /// Snapshot file whose real part is the potential (from_file only).
  std::string path;

  static PotentialSpec harmonic(std::array<double, 3> g = {1.0, 1.0, 1.0}, double s = 1.0) {
    return PotentialSpec{PotentialKind::harmonic, g, s, {}};
  }
  static PotentialSpec none() { return harmonic({1.0, 1.0, 1.0}, 0.0); }
  static PotentialSpec from_file(std::string p) {
    return PotentialSpec{PotentialKind::from_file, {1.0, 1.0, 1.0}, 1.0, std::move(p)};
  }
};

struct GpParams {
  double beta = 0.0;
  double omega = 0.0;
  PotentialSpec potential = PotentialSpec::none();
  /// SAV shift; q = sqrt(||psi||_4^4 + c0).
  double c0 = 1.0;
};

inline std::vector<double> evaluate_potential(const PotentialSpec& spec, const GridPtr& grid) {
  const Grid& g = *grid;
  std::vector<double> v(g.total_size(), 0.0);
  if (spec.kind == PotentialKind::harmonic) {
    const auto n = g.sizes();
    for (std::size_t k = 0; k < n[2]; ++k)
      for (std::size_t j = 0; j < n[1]; ++j)
        for (std::size_t i = 0; i < n[0]; ++i) {
          const std::array<double, 3> x{g.coords(0)[i], g.coords(1)[j], g.coords(2)[k]};
          double acc = 0.0;
          for (int w = 0; w < g.dim(); ++w) acc += spec.gammas[w] * spec.gammas[w] * x[w] * x[w];
          v[g.flat_index(i, j, k)] = spec.scale * 0.5 * acc;
        }
    return v;
  }
  const Snapshot snap = read_snapshot(spec.path);
  const Field f = field_from_snapshot(snap, grid);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = spec.scale * f[i].real();
    if (!std::isfinite(v[i])) throw InvalidArgument("potential file holds non-finite values");
  }
  return v;
}

/// The discrete linear operator L_h u = -1/2 Lap_h u + V u - Omega Lz_h u with
/// V evaluated once on the grid. Immutable once built.
class GpOperator {
 public:
  GpOperator(const GpParams& params, GridPtr grid)
      : params_(params), grid_(std::move(grid)), potential_(evaluate_potential(params.potential, grid_)) {
    if (!(params_.c0 > 0.0)) throw InvalidArgument("GpParams: c0 must be positive");
    if (params_.omega != 0.0 && grid_->dim() < 2)
      throw UnsupportedOperation("rotation term needs a 2D or 3D grid");
  }

  const GpParams& params() const noexcept { return params_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const Grid& grid() const noexcept { return *grid_; }
  const std::vector<double>& potential() const noexcept { return potential_; }
  bool rotating() const noexcept { return params_.omega != 0.0; }

  Field apply(const Field& u) const {
    Field uhat = to_spectral(u);
    Field lap = spectral_laplacian(uhat);
    Field out = apply_nonlaplacian(u, uhat);
    auto o = out.data();
    auto l = lap.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] -= 0.5 * l[i];
    return out;
  }

  /// V u - Omega Lz u, given u and its forward transform.
  Field apply_nonlaplacian(const Field& u, const Field& uhat) const {
    Field out(grid_);
    accumulate_nonlaplacian(u.data(), uhat.data(), out.data());
    return out;
  }

  Field apply_nonlaplacian(const Field& u) const { return apply_nonlaplacian(u, to_spectral(u)); }

  Field apply_lz(const Field& u) const {
    require_rotation_grid();
    Field out(grid_);
    accumulate_lz(to_spectral(u).data(), 1.0, out.data());
    return out;
  }

  /// out = V u - Omega Lz u. `uhat` is the forward transform of `u`.
  void accumulate_nonlaplacian(std::span<const Complex> u, std::span<const Complex> uhat,
                               std::span<Complex> out) const {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = potential_[i] * u[i];
    if (rotating()) accumulate_lz(uhat, -params_.omega, out);
  }

  /// out += weight * Lz u with Lz u = -i (x d_y u - y d_x u).
  void accumulate_lz(std::span<const Complex> uhat, double weight, std::span<Complex> out) const {
    require_rotation_grid();
    const Grid& g = *grid_;
    ComplexBuffer dx(uhat.begin(), uhat.end());
    ComplexBuffer dy(uhat.begin(), uhat.end());
    detail::scale_along_axis(std::span<Complex>(dx), g, 0, g.eig1(0));
    detail::scale_along_axis(std::span<Complex>(dy), g, 1, g.eig1(1));
    g.fft().inverse(dx);
    g.fft().inverse(dy);
    const auto n = g.sizes();
    const Complex factor(0.0, -weight);
    for (std::size_t k = 0; k < n[2]; ++k)
      for (std::size_t j = 0; j < n[1]; ++j) {
        const double y = g.coords(1)[j];
        for (std::size_t i = 0; i < n[0]; ++i) {
          const double x = g.coords(0)[i];
          const std::size_t idx = g.flat_index(i, j, k);
          out[idx] += factor * (x * dy[idx] - y * dx[idx]);
        }
      }
  }

 private:
  void require_rotation_grid() const {
    if (grid_->dim() < 2) throw UnsupportedOperation("Lz needs a 2D or 3D grid");
  }

  Field spectral_laplacian(const Field& uhat) const {
    Field out = uhat;
    const auto& sym = grid_->laplacian_symbol();
    auto d = out.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= sym[i];
    return from_spectral(std::move(out));
  }

  GpParams params_;
  GridPtr grid_;
  std::vector<double> potential_;
};

/// Lz_h u = -i (X D1y - Y D1x) u.
inline Field apply_lz(const Field& field) {
  if (field.grid().dim() < 2) throw UnsupportedOperation("Lz needs a 2D or 3D grid");
  GpParams p;
  p.omega = 1.0;
  return GpOperator(p, field.grid_ptr()).apply_lz(field);
}

inline Field apply_linear(const GpParams& params, const Field& field) {
  return GpOperator(params, field.grid_ptr()).apply(field);
}

}  // namespace gpsav
