#pragma once

#include <cmath>

#include "gpsav/gp_operator.hpp"
#include "gpsav/spectral.hpp"

namespace gpsav {

/// Wave function plus the scalar auxiliary variable, evolved together.
struct SavState {
  Field psi;
  double q = 0.0;
};

/// q = sqrt(||psi0||_{4,h}^4 + c0), the consistent initial auxiliary value.
inline SavState init_state(const GpParams& params, Field psi0) {
  if (!psi0.all_finite()) throw InvalidArgument("init_state: psi0 has non-finite entries");
  if (!(params.c0 > 0.0)) throw InvalidArgument("init_state: c0 must be positive");
  const double q = std::sqrt(quartic_integral(psi0) + params.c0);
  return SavState{std::move(psi0), q};
}

inline double mass(const Field& psi) { return inner(psi, psi).real(); }
inline double mass(const SavState& s) { return mass(s.psi); }

/// <L_h psi, psi>_h; real up to round-off, the imaginary residue is dropped.
inline double quadratic_part(const GpOperator& op, const Field& psi) {
  return inner(op.apply(psi), psi).real();
}

/// E_h = <L_h psi, psi>_h + beta/2 q^2 - beta/2 c0; conserved by the scheme.
inline double modified_energy(const GpOperator& op, const SavState& s) {
  const auto& p = op.params();
  return quadratic_part(op, s.psi) + 0.5 * p.beta * (s.q * s.q - p.c0);
}

/// H_h = <L_h psi, psi>_h + beta/2 ||psi||_{4,h}^4; drifts at the order of the method.
inline double hamiltonian_energy(const GpOperator& op, const SavState& s) {
  return quadratic_part(op, s.psi) + 0.5 * op.params().beta * quartic_integral(s.psi);
}

inline double modified_energy(const GpParams& params, const SavState& s) {
  return modified_energy(GpOperator(params, s.psi.grid_ptr()), s);
}

inline double hamiltonian_energy(const GpParams& params, const SavState& s) {
  return hamiltonian_energy(GpOperator(params, s.psi.grid_ptr()), s);
}

}  // namespace gpsav
