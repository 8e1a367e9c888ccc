#pragma once

// Brute-force reference implementations for tiny grids. Everything here is
// materialized densely with Eigen and deliberately shares no numerical path
// with the FFT-based solver beyond the grid description.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gpsav/error.hpp"
#include "gpsav/gauss_tableau.hpp"
#include "gpsav/gp_operator.hpp"
#include "gpsav/grid.hpp"
#include "gpsav/sav_integrator.hpp"
#include "gpsav/sav_state.hpp"

namespace gpsav::oracle {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr std::size_t kDenseSizeLimit = 4096;

struct DenseOperator {
  std::size_t n = 0;
  Matrix matrix;

  double hermitian_residual() const { return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff(); }
};

/// Unitary DFT matrix, (F)_{jk} = e^{-2 pi i jk/N} / sqrt(N).
inline Matrix dft_matrix(std::size_t n) {
  Matrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>((j * k) % n) /
                         static_cast<double>(n);
      f(j, k) = std::polar(scale, ang);
    }
  return f;
}

/// F^H diag(symbol) F.
template <typename T>
Matrix spectral_matrix(const std::vector<T>& symbol) {
  const std::size_t n = symbol.size();
  const Matrix f = dft_matrix(n);
  Vector d(n);
  for (std::size_t p = 0; p < n; ++p) d(p) = Complex(symbol[p]);
  return f.adjoint() * d.asDiagonal() * f;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Lifts a 1D operator on `axis` to the full x-fastest grid: I (x) ... (x) D (x) ... (x) I.
inline Matrix lift_axis(const Matrix& d, const Grid& g, int axis) {
  Matrix out = Matrix::Identity(1, 1);
  for (int w = kMaxDim - 1; w >= 0; --w) {
    const auto n = static_cast<Eigen::Index>(g.size(w));
    out = kron(out, w == axis ? d : Matrix::Identity(n, n));
  }
  return out;
}

inline Matrix derivative_matrix(const Grid& g, int axis, int order) {
  return order == 1 ? lift_axis(spectral_matrix(g.eig1(axis)), g, axis)
                    : lift_axis(spectral_matrix(g.eig2(axis)), g, axis);
}

inline void check_size(const Grid& g) {
  if (g.total_size() > kDenseSizeLimit)
    throw InvalidArgument("oracle: grid has " + std::to_string(g.total_size()) +
                          " points, dense limit is " + std::to_string(kDenseSizeLimit));
}

inline Matrix coordinate_diagonal(const Grid& g, int axis) {
  Vector d(static_cast<Eigen::Index>(g.total_size()));
  const auto n = g.sizes();
  for (std::size_t k = 0; k < n[2]; ++k)
    for (std::size_t j = 0; j < n[1]; ++j)
      for (std::size_t i = 0; i < n[0]; ++i) {
        const std::size_t p = axis == 0 ? i : (axis == 1 ? j : k);
        d(static_cast<Eigen::Index>(g.flat_index(i, j, k))) = g.coords(axis)[p];
      }
  return d.asDiagonal();
}

/// Dense -i (X D1y - Y D1x).
inline Matrix dense_lz(const Grid& g) {
  check_size(g);
  if (g.dim() < 2) throw UnsupportedOperation("oracle: Lz needs dim >= 2");
  const Matrix x = coordinate_diagonal(g, 0);
  const Matrix y = coordinate_diagonal(g, 1);
  return Complex(0.0, -1.0) * (x * derivative_matrix(g, 1, 1) - y * derivative_matrix(g, 0, 1));
}

/// Dense L_h = -1/2 Lap_h + diag(V) - Omega Lz_h built from explicit DFT matrices.
inline DenseOperator assemble_dense(const GpParams& params, const GridPtr& grid) {
  const Grid& g = *grid;
  check_size(g);
  const auto n = static_cast<Eigen::Index>(g.total_size());
  Matrix lap = Matrix::Zero(n, n);
  for (int w = 0; w < g.dim(); ++w) lap += derivative_matrix(g, w, 2);
  const std::vector<double> v = evaluate_potential(params.potential, grid);
  Vector vd(n);
  for (Eigen::Index p = 0; p < n; ++p) vd(p) = v[static_cast<std::size_t>(p)];
  Matrix l = -0.5 * lap;
  l += Matrix(vd.asDiagonal());
  if (params.omega != 0.0) {
    if (g.dim() < 2) throw UnsupportedOperation("oracle: rotation needs dim >= 2");
    l -= params.omega * dense_lz(g);
  }
  return DenseOperator{g.total_size(), std::move(l)};
}

inline Vector to_vector(const Field& f) {
  Vector v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) v(static_cast<Eigen::Index>(i)) = f[i];
  return v;
}

inline Field to_field(const Vector& v, const GridPtr& grid) {
  Field f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = v(static_cast<Eigen::Index>(i));
  return f;
}

inline Field dense_apply(const DenseOperator& op, const Field& u) {
  return to_field(op.matrix * to_vector(u), u.grid_ptr());
}

/// Same stage equations as the fast solver, but with the whole of L_h on the
/// left: each iterate solves (I + i tau A (x) L_h) k = -i L_h psi - i beta Phi Q
/// with one dense LU of the (s n) x (s n) block matrix.
inline SavState dense_step(const GpParams& params, const ButcherTableau& tab,
                           const SolverOptions& opts, const SavState& state, double tau,
                           StepStats* stats_out = nullptr) {
  const GridPtr& grid = state.psi.grid_ptr();
  const Grid& g = *grid;
  check_size(g);
  if (!(tau >= 0.0)) throw InvalidArgument("dense_step: tau must be >= 0");
  const DenseOperator op = assemble_dense(params, grid);
  const Matrix& l = op.matrix;
  const int s = tab.s;
  const auto n = static_cast<Eigen::Index>(op.n);
  const double vol = g.cell_volume();
  const Complex mi(0.0, -1.0);

  Matrix block = Matrix::Identity(s * n, s * n);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) block.block(i * n, j * n, n, n) -= mi * tau * tab(i, j) * l;
  const Eigen::PartialPivLU<Matrix> lu(block);

  const Vector psi = to_vector(state.psi);
  const Vector lpsi = l * psi;

  auto phi_of = [&](const Vector& u) {
    const double quartic = u.cwiseAbs2().cwiseAbs2().sum() * vol;
    Vector out = u.cwiseAbs2().cast<Complex>().cwiseProduct(u);
    return Vector(out / std::sqrt(quartic + params.c0));
  };

  std::vector<Vector> phi(s);
  std::vector<double> lslope(s, 0.0);
  std::vector<double> qs(s, 0.0);
  auto stage_scalars = [&](const Vector& k) {
    for (int i = 0; i < s; ++i) {
      Vector stage = psi;
      for (int j = 0; j < s; ++j) stage += tau * tab(i, j) * k.segment(j * n, n);
      phi[i] = phi_of(stage);
      lslope[i] = 2.0 * vol * phi[i].dot(k.segment(i * n, n)).real();
    }
    for (int i = 0; i < s; ++i) {
      qs[i] = state.q;
      for (int j = 0; j < s; ++j) qs[i] += tau * tab(i, j) * lslope[j];
    }
  };

  Vector k(s * n);
  {
    const Vector guess = mi * (lpsi + params.beta * state.q * phi_of(psi));
    for (int i = 0; i < s; ++i) k.segment(i * n, n) = guess;
  }
  StepStats stats;
  bool converged = false;
  for (int it = 1; it <= opts.max_iter; ++it) {
    stage_scalars(k);
    Vector rhs(s * n);
    for (int i = 0; i < s; ++i)
      rhs.segment(i * n, n) = mi * lpsi + mi * params.beta * qs[i] * phi[i];
    const Vector next = lu.solve(rhs);
    double residual = 0.0;
    double knorm = 0.0;
    for (int i = 0; i < s; ++i) {
      residual = std::max(residual,
                          (next.segment(i * n, n) - k.segment(i * n, n)).cwiseAbs().maxCoeff());
      knorm = std::max(knorm, next.segment(i * n, n).cwiseAbs().maxCoeff());
    }
    k = next;
    stats = StepStats{it, residual};
    if (!std::isfinite(residual)) throw NumericalBlowup("dense_step: non-finite iterate");
    if (residual < opts.tol * std::max(1.0, knorm)) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw StepDiverged("dense_step: no convergence", stats.residual, stats.iterations);
  stage_scalars(k);

  Vector out = psi;
  double q = state.q;
  for (int i = 0; i < s; ++i) {
    out += tau * tab.b[i] * k.segment(i * n, n);
    q += tau * tab.b[i] * lslope[i];
  }
  if (stats_out != nullptr) *stats_out = stats;
  return SavState{to_field(out, grid), q};
}

/// Linear (beta = 0) step through the Gauss stability function written as the
/// (s, s) Pade approximant of exp: psi^{n+1} = P(-Z)^{-1} P(Z) psi with
/// Z = -i tau L_h and P(z) = sum_k (2s-k)! s! / ((2s)! k! (s-k)!) z^k.
inline Field pade_linear_step(const DenseOperator& op, int s, double tau, const Field& psi) {
  const auto n = static_cast<Eigen::Index>(op.n);
  const Matrix z = Complex(0.0, -tau) * op.matrix;
  auto fact = [](int m) {
    double r = 1.0;
    for (int i = 2; i <= m; ++i) r *= i;
    return r;
  };
  Matrix num = Matrix::Zero(n, n);
  Matrix den = Matrix::Zero(n, n);
  Matrix zpow = Matrix::Identity(n, n);
  for (int k = 0; k <= s; ++k) {
    const double coef = fact(2 * s - k) * fact(s) / (fact(2 * s) * fact(k) * fact(s - k));
    num += coef * zpow;
    den += (k % 2 == 0 ? coef : -coef) * zpow;
    zpow = zpow * z;
  }
  const Vector rhs = num * to_vector(psi);
  return to_field(den.partialPivLu().solve(rhs), psi.grid_ptr());
}

struct IntegrandSpec {
  /// "unit", "gaussian_mass", "gaussian_quartic" or "plane_wave_energy"
  std::string id;
  int dim = 3;
  std::array<double, 3> lower{-8, -8, -8};
  std::array<double, 3> upper{8, 8, 8};
  /// Working resolution; the oracle samples at `resolution` times this.
  std::array<std::size_t, 3> sizes{32, 32, 32};
  std::array<double, 3> gammas{1, 1, 1};
  /// plane_wave_energy: A exp(i sum_w k_w mu_w x_w), energy 1/2|grad|^2 + beta/2 |psi|^4
  double amplitude = 1.0;
  std::array<int, 3> wave_numbers{1, 0, 0};
  double beta = 0.0;
};

struct QuadratureResult {
  double numeric = 0.0;
  std::optional<double> closed_form;
};

/// Periodic trapezoid rule at `resolution` x the working grid, plus the
/// closed form where one exists.
inline QuadratureResult quadrature_oracle(const IntegrandSpec& spec, int resolution = 4) {
  if (resolution < 4) throw InvalidArgument("quadrature_oracle: resolution must be >= 4");
  if (spec.dim < 1 || spec.dim > 3) throw InvalidArgument("quadrature_oracle: bad dim");
  const double pi = std::numbers::pi;
  const int d = spec.dim;
  double gprod = 1.0;
  double vol = 1.0;
  for (int w = 0; w < d; ++w) {
    gprod *= spec.gammas[w];
    vol *= spec.upper[w] - spec.lower[w];
  }
  // Prefactors of the separable Gaussian family psi0 = C_d exp(-V).
  const double cd = d == 1   ? std::pow(gprod, 0.25) / std::pow(pi, 0.25)
                    : d == 2 ? std::pow(gprod, 0.25) / (std::sqrt(2.0) * std::sqrt(pi))
                             : std::pow(gprod, 0.25) / (2.0 * std::pow(pi, 0.75));

  std::function<double(const std::array<double, 3>&)> f;
  std::optional<double> closed;
  if (spec.id == "unit") {
    f = [](const auto&) { return 1.0; };
    closed = vol;
  } else if (spec.id == "gaussian_mass" || spec.id == "gaussian_quartic") {
    const double power = spec.id == "gaussian_mass" ? 2.0 : 4.0;
    f = [&, power](const std::array<double, 3>& x) {
      double v = 0.0;
      for (int w = 0; w < d; ++w) v += spec.gammas[w] * spec.gammas[w] * x[w] * x[w];
      return std::pow(cd, power) * std::exp(-power * 0.5 * v);
    };
    // int C^p exp(-(p/2) sum gamma^2 x^2) = C^p prod sqrt(2 pi / (p gamma^2))
    closed = std::pow(cd, power) * std::pow(2.0 * pi / power, 0.5 * d) / gprod;
  } else if (spec.id == "plane_wave_energy") {
    double k2 = 0.0;
    for (int w = 0; w < d; ++w) {
      const double kw = spec.wave_numbers[w] * 2.0 * pi / (spec.upper[w] - spec.lower[w]);
      k2 += kw * kw;
    }
    const double a2 = spec.amplitude * spec.amplitude;
    const double density = 0.5 * k2 * a2 + 0.5 * spec.beta * a2 * a2;
    f = [density](const auto&) { return density; };
    closed = density * vol;
  } else {
    throw InvalidArgument("quadrature_oracle: unknown integrand '" + spec.id + "'");
  }

  std::array<std::size_t, 3> n{1, 1, 1};
  std::array<double, 3> h{1, 1, 1};
  for (int w = 0; w < d; ++w) {
    n[w] = spec.sizes[w] * static_cast<std::size_t>(resolution);
    h[w] = (spec.upper[w] - spec.lower[w]) / static_cast<double>(n[w]);
  }
  double acc = 0.0;
  std::array<double, 3> x{0, 0, 0};
  for (std::size_t k = 0; k < n[2]; ++k) {
    if (d > 2) x[2] = spec.lower[2] + k * h[2];
    for (std::size_t j = 0; j < n[1]; ++j) {
      if (d > 1) x[1] = spec.lower[1] + j * h[1];
      for (std::size_t i = 0; i < n[0]; ++i) {
        x[0] = spec.lower[0] + i * h[0];
        acc += f(x);
      }
    }
  }
  double cell = 1.0;
  for (int w = 0; w < d; ++w) cell *= h[w];
  return QuadratureResult{acc * cell, closed};
}

}  // namespace gpsav::oracle
