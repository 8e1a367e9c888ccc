#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gpsav/error.hpp"
#include "gpsav/sav_state.hpp"
#include "gpsav/spectral.hpp"

namespace gpsav {

enum class Norm { inf, l2 };

/// ||u - v||_{inf,h} or ||u - v||_h.
inline double field_error(const Field& u, const Field& v, Norm norm = Norm::inf) {
  u.require_same_grid(v);
  Field d = u - v;
  return norm == Norm::inf ? norm_inf(d) : norm_h(d);
}

/// Observed orders ln(e1/e2) / ln(d1/d2) between consecutive ladder entries.
inline std::vector<double> convergence_rate(const std::vector<double>& errors,
                                            const std::vector<double>& steps) {
  if (errors.size() != steps.size() || errors.size() < 2)
    throw InvalidArgument("convergence_rate: need two or more (error, step) pairs");
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0)) throw UndefinedRate("convergence_rate: non-positive error (floor reached)");
    if (!(steps[i] > 0.0)) throw InvalidArgument("convergence_rate: step sizes must be positive");
  }
  std::vector<double> rates;
  rates.reserve(errors.size() - 1);
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (steps[i] == steps[i - 1]) throw InvalidArgument("convergence_rate: repeated step size");
    rates.push_back(std::log(errors[i - 1] / errors[i]) / std::log(steps[i - 1] / steps[i]));
  }
  return rates;
}

/// Invariant values at t_0 and the absolute drifts e(M), e(H), e(E) since.
struct DriftSeries {
  std::vector<std::size_t> steps;
  std::vector<double> times;
  std::vector<double> mass;
  std::vector<double> modified_energy;
  std::vector<double> hamiltonian;
  std::vector<double> mass_err;
  std::vector<double> ham_err;
  std::vector<double> quad_err;
  std::vector<double> q_series;

  std::size_t size() const noexcept { return times.size(); }

  void append(std::size_t step, double t, double m, double e, double h, double q) {
    const bool first = times.empty();
    steps.push_back(step);
    times.push_back(t);
    mass.push_back(m);
    modified_energy.push_back(e);
    hamiltonian.push_back(h);
    mass_err.push_back(first ? 0.0 : std::abs(m - mass.front()));
    quad_err.push_back(first ? 0.0 : std::abs(e - modified_energy.front()));
    ham_err.push_back(first ? 0.0 : std::abs(h - hamiltonian.front()));
    q_series.push_back(q);
  }

  void append(const GpOperator& op, std::size_t step, double t, const SavState& s) {
    append(step, t, gpsav::mass(s), gpsav::modified_energy(op, s), hamiltonian_energy(op, s), s.q);
  }

  double max_mass_err() const { return max_of(mass_err); }
  double max_quad_err() const { return max_of(quad_err); }
  double max_ham_err() const { return max_of(ham_err); }

 private:
  static double max_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  }
};

}  // namespace gpsav
