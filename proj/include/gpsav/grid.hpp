#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gpsav/error.hpp"
#include "gpsav/fft.hpp"

namespace gpsav {

inline constexpr int kMaxDim = 3;

/// Periodic tensor-product grid on [lower, upper) per axis.
///
/// Spectral eigenvalues follow the usual FFT index order. The first
/// derivative zeroes the Nyquist mode (p = N/2) while the second derivative
/// keeps it as -(mu N/2)^2, so D2 != D1*D1 on that single mode.
class Grid {
 public:
  int dim() const noexcept { return dim_; }
  /// Point count along `axis`; 1 for axes beyond dim().
  std::size_t size(int axis) const noexcept { return sizes_[axis]; }
  std::array<std::size_t, kMaxDim> sizes() const noexcept { return sizes_; }
  std::size_t total_size() const noexcept { return total_; }

  double lower(int axis) const noexcept { return lower_[axis]; }
  double upper(int axis) const noexcept { return upper_[axis]; }
  double length(int axis) const noexcept { return upper_[axis] - lower_[axis]; }
  double spacing(int axis) const noexcept { return spacing_[axis]; }
  double mu(int axis) const noexcept { return mu_[axis]; }
  /// Product of spacings over the active axes.
  double cell_volume() const noexcept { return cell_volume_; }

  const std::vector<double>& coords(int axis) const { return coords_.at(axis); }
  const std::vector<Complex>& eig1(int axis) const { return eig1_.at(axis); }
  const std::vector<double>& eig2(int axis) const { return eig2_.at(axis); }

  /// Sum of second-derivative eigenvalues over the active axes, x-fastest.
  const std::vector<double>& laplacian_symbol() const noexcept { return lap_symbol_; }

  const Fft& fft() const noexcept { return *fft_; }

  std::size_t flat_index(std::size_t i, std::size_t j = 0, std::size_t k = 0) const noexcept {
    return i + sizes_[0] * (j + sizes_[1] * k);
  }

  bool same_as(const Grid& other) const noexcept {
    return this == &other ||
           (dim_ == other.dim_ && sizes_ == other.sizes_ && lower_ == other.lower_ &&
            upper_ == other.upper_);
  }

  friend std::shared_ptr<const Grid> make_grid(int, std::span<const std::size_t>,
                                               std::span<const double>,
                                               std::span<const double>);

 private:
  Grid() = default;

  int dim_ = 0;
  std::array<std::size_t, kMaxDim> sizes_{1, 1, 1};
  std::array<double, kMaxDim> lower_{0, 0, 0};
  std::array<double, kMaxDim> upper_{1, 1, 1};
  std::array<double, kMaxDim> spacing_{1, 1, 1};
  std::array<double, kMaxDim> mu_{0, 0, 0};
  std::size_t total_ = 1;
  double cell_volume_ = 1.0;
  std::vector<std::vector<double>> coords_;
  std::vector<std::vector<Complex>> eig1_;
  std::vector<std::vector<double>> eig2_;
  std::vector<double> lap_symbol_;
  std::shared_ptr<const Fft> fft_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a grid with `dim` active axes. Sizes must be even and >= 4.
inline GridPtr make_grid(int dim, std::span<const std::size_t> sizes,
                         std::span<const double> lower, std::span<const double> upper) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("make_grid: dim must be 1, 2 or 3");
  if (sizes.size() < static_cast<std::size_t>(dim) ||
      lower.size() < static_cast<std::size_t>(dim) ||
      upper.size() < static_cast<std::size_t>(dim)) {
    throw InvalidArgument("make_grid: need one size/lower/upper entry per axis");
  }
  std::shared_ptr<Grid> g(new Grid());
  g->dim_ = dim;
  g->coords_.resize(kMaxDim);
  g->eig1_.resize(kMaxDim);
  g->eig2_.resize(kMaxDim);
  for (int w = 0; w < dim; ++w) {
    const std::size_t n = sizes[w];
    if (n < 4 || n % 2 != 0) {
      throw InvalidArgument("make_grid: axis " + std::to_string(w) +
                            " size must be even and >= 4, got " + std::to_string(n));
    }
    if (!(upper[w] > lower[w]) || !std::isfinite(lower[w]) || !std::isfinite(upper[w])) {
      throw InvalidArgument("make_grid: axis " + std::to_string(w) + " has an empty interval");
    }
    const double len = upper[w] - lower[w];
    g->sizes_[w] = n;
    g->lower_[w] = lower[w];
    g->upper_[w] = upper[w];
    g->spacing_[w] = len / static_cast<double>(n);
    g->mu_[w] = 2.0 * std::numbers::pi / len;

    auto& x = g->coords_[w];
    auto& e1 = g->eig1_[w];
    auto& e2 = g->eig2_[w];
    x.resize(n);
    e1.resize(n);
    e2.resize(n);
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    for (std::size_t p = 0; p < n; ++p) {
      x[p] = lower[w] + static_cast<double>(p) * g->spacing_[w];
      const auto ip = static_cast<std::ptrdiff_t>(p);
      const std::ptrdiff_t wrapped = ip <= half ? ip : ip - static_cast<std::ptrdiff_t>(n);
      const double k1 = ip == half ? 0.0 : static_cast<double>(wrapped);
      const double k2 = g->mu_[w] * static_cast<double>(wrapped);
      e1[p] = Complex(0.0, g->mu_[w] * k1);
      e2[p] = -(k2 * k2);
    }
  }
  for (int w = dim; w < kMaxDim; ++w) {
    g->coords_[w] = {0.0};
    g->eig1_[w] = {Complex(0.0, 0.0)};
    g->eig2_[w] = {0.0};
  }
  g->total_ = g->sizes_[0] * g->sizes_[1] * g->sizes_[2];
  g->cell_volume_ = 1.0;
  for (int w = 0; w < dim; ++w) g->cell_volume_ *= g->spacing_[w];

  g->lap_symbol_.resize(g->total_);
  for (std::size_t k = 0; k < g->sizes_[2]; ++k)
    for (std::size_t j = 0; j < g->sizes_[1]; ++j)
      for (std::size_t i = 0; i < g->sizes_[0]; ++i)
        g->lap_symbol_[g->flat_index(i, j, k)] =
            g->eig2_[0][i] + g->eig2_[1][j] + g->eig2_[2][k];

  g->fft_ = std::make_shared<const Fft>(
      std::span<const std::size_t>(g->sizes_.data(), static_cast<std::size_t>(dim)));
  return g;
}

inline GridPtr make_grid(int dim, std::initializer_list<std::size_t> sizes,
                         std::initializer_list<double> lower, std::initializer_list<double> upper) {
  return make_grid(dim, std::span<const std::size_t>(sizes.begin(), sizes.size()),
                   std::span<const double>(lower.begin(), lower.size()),
                   std::span<const double>(upper.begin(), upper.size()));
}

/// Complex grid function stored x-fastest.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid) : grid_(std::move(grid)), data_(checked(grid_)->total_size()) {}
  Field(GridPtr grid, ComplexBuffer data) : grid_(std::move(grid)), data_(std::move(data)) {
    if (data_.size() != checked(grid_)->total_size())
      throw InvalidArgument("Field: data length does not match grid");
  }

  /// Samples f(x) at every grid point; x holds zeros on inactive axes.
  template <typename F>
  static Field sample(GridPtr grid, F&& f) {
    Field out(std::move(grid));
    const Grid& g = out.grid();
    const auto n = g.sizes();
    std::array<double, kMaxDim> x{};
    for (std::size_t k = 0; k < n[2]; ++k) {
      x[2] = g.coords(2)[k];
      for (std::size_t j = 0; j < n[1]; ++j) {
        x[1] = g.coords(1)[j];
        for (std::size_t i = 0; i < n[0]; ++i) {
          x[0] = g.coords(0)[i];
          out.data_[g.flat_index(i, j, k)] = static_cast<Complex>(f(x));
        }
      }
    }
    return out;
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }
  Complex& operator[](std::size_t i) noexcept { return data_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return data_[i]; }

  bool all_finite() const noexcept {
    for (const auto& v : data_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  Field& operator+=(const Field& o) {
    require_same_grid(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_grid(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Field& operator*=(Complex a) noexcept {
    for (auto& v : data_) v *= a;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Complex a, Field f) { return f *= a; }
  friend Field operator*(Field f, Complex a) { return f *= a; }

  void require_same_grid(const Field& o) const {
    if (!grid_ || !o.grid_ || !grid_->same_as(*o.grid_))
      throw InvalidArgument("Field: operands live on different grids");
  }

 private:
  static const GridPtr& checked(const GridPtr& g) {
    if (!g) throw InvalidArgument("Field: null grid");
    return g;
  }

  GridPtr grid_;
  ComplexBuffer data_;
};

}  // namespace gpsav
