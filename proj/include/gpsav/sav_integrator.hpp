#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gpsav/error.hpp"
#include "gpsav/gauss_tableau.hpp"
#include "gpsav/gp_operator.hpp"
#include "gpsav/sav_state.hpp"
#include "gpsav/spectral.hpp"

namespace gpsav {

enum class InitialGuess {
  /// k_i = -i (L_h psi^n + beta Phi(psi^n) q^n) for every stage
  explicit_rhs,
  /// converged slopes of the previous step (falls back to explicit_rhs on the first)
  previous_step,
};

struct SolverOptions {
  double tol = 1e-14;
  int max_iter = 200;
  InitialGuess initial_guess = InitialGuess::explicit_rhs;
};

struct StepStats {
  int iterations = 0;
  double residual = 0.0;
};

/// Stage quantities of the most recent step.
struct StageWork {
  std::vector<Field> k;           // stage slopes k_i
  std::vector<double> l;          // scalar slopes l_i = 2 Re<k_i, Phi_i>_h
  std::vector<Field> psi_stages;  // Psi_i = psi^n + tau sum_j a_ij k_j
  std::vector<double> q_stages;   // Q_i = q^n + tau sum_j a_ij l_j
  std::vector<Field> phi;         // Phi_i = |Psi_i|^2 Psi_i / sqrt(||Psi_i||_4^4 + c0)
  std::vector<Field> fhat;        // transformed right-hand sides
};

namespace detail {

/// Solves m x = rhs for a small dense complex system (n <= kMaxStages) by
/// Gaussian elimination with partial pivoting. `m` is row-major and is
/// overwritten; the solution replaces `rhs`.
inline void solve_small(int n, std::array<Complex, kMaxStages * kMaxStages>& m,
                        std::array<Complex, kMaxStages>& rhs) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(m[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(m[r * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(m[col * n + c], m[piv * n + c]);
      std::swap(rhs[col], rhs[piv]);
    }
    const Complex inv = 1.0 / m[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const Complex f = m[r * n + col] * inv;
      if (f == Complex(0.0, 0.0)) continue;
      for (int c = col; c < n; ++c) m[r * n + c] -= f * m[col * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    Complex acc = rhs[r];
    for (int c = r + 1; c < n; ++c) acc -= m[r * n + c] * rhs[c];
    rhs[r] = acc / m[r * n + r];
  }
}

inline double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace detail

/// Nonlinear stage term Phi = |Psi|^2 Psi / sqrt(||Psi||_{4,h}^4 + c0).
inline Field sav_nonlinearity(const Field& psi, double c0) {
  const double denom = std::sqrt(quartic_integral(psi) + c0);
  Field out(psi.grid_ptr());
  auto src = psi.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::norm(src[i]) * src[i] / denom;
  return out;
}

/// Advances (psi, q) with s-stage Gauss collocation in time.
///
/// Stage equations are solved by fixed-point iteration in which the
/// Laplacian part of L_h is implicit: every Fourier mode then decouples into
/// an s x s system (I - (i tau / 2) lambda A) k~ = f~, while the potential,
/// rotation and nonlinear terms are lagged by one iterate.
class SavStepper {
 public:
  SavStepper(std::shared_ptr<const GpOperator> op, ButcherTableau tab, SolverOptions opts = {})
      : op_(std::move(op)), tab_(std::move(tab)), opts_(opts) {
    if (!op_) throw InvalidArgument("SavStepper: null operator");
    if (tab_.s < 1 || tab_.s > kMaxStages) throw InvalidArgument("SavStepper: bad stage count");
    if (!(opts_.tol > 0.0)) throw InvalidArgument("SolverOptions: tol must be positive");
    if (opts_.max_iter < 1) throw InvalidArgument("SolverOptions: max_iter must be >= 1");
  }

  SavStepper(const GpParams& params, GridPtr grid, ButcherTableau tab, SolverOptions opts = {})
      : SavStepper(std::make_shared<const GpOperator>(params, std::move(grid)), std::move(tab),
                   opts) {}

  const GpOperator& op() const noexcept { return *op_; }
  const ButcherTableau& tableau() const noexcept { return tab_; }
  const SolverOptions& options() const noexcept { return opts_; }
  const StageWork& work() const noexcept { return work_; }

  std::pair<SavState, StepStats> step(const SavState& state, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("step: tau must be positive");
    if (!state.psi.grid().same_as(op_->grid()))
      throw InvalidArgument("step: state grid differs from operator grid");
    if (!state.psi.all_finite() || !std::isfinite(state.q))
      throw NumericalBlowup("step: input state is not finite");

    const int s = tab_.s;
    const GridPtr& gp = op_->grid_ptr();
    const Grid& g = *gp;
    const Fft& fft = g.fft();
    const double beta = op_->params().beta;
    const double c0 = op_->params().c0;
    const Field& psi = state.psi;
    const std::size_t n = psi.size();
    const Complex mi(0.0, -1.0);

    prepare_work(gp);

    // -i L_h psi^n is common to every stage and iterate.
    Field base = op_->apply(psi);
    base *= mi;

    const bool warm = opts_.initial_guess == InitialGuess::previous_step && have_previous_;
    if (!warm) {
      Field guess = base;
      if (beta != 0.0) {
        const Field phi0 = sav_nonlinearity(psi, c0);
        auto gd = guess.data();
        auto pd = phi0.data();
        for (std::size_t p = 0; p < n; ++p) gd[p] += mi * beta * state.q * pd[p];
      }
      for (int i = 0; i < s; ++i) work_.k[i] = guess;
    }
    for (int i = 0; i < s; ++i) {
      std::copy(work_.k[i].data().begin(), work_.k[i].data().end(), khat_[i].data().begin());
      fft.forward(khat_[i].data());
    }

    StepStats stats;
    bool converged = false;
    for (int it = 1; it <= opts_.max_iter; ++it) {
      for (int j = 0; j < s; ++j)
        op_->accumulate_nonlaplacian(work_.k[j].data(), khat_[j].data(), lagged_[j].data());
      update_stage_scalars(psi, state.q, tau);

      for (int i = 0; i < s; ++i) {
        auto f = work_.fhat[i].data();
        auto b = base.data();
        auto ph = work_.phi[i].data();
        const Complex nl = mi * beta * work_.q_stages[i];
        for (std::size_t p = 0; p < n; ++p) f[p] = b[p] + nl * ph[p];
        for (int j = 0; j < s; ++j) {
          const Complex w = mi * tau * tab_(i, j);
          if (w == Complex(0.0, 0.0)) continue;
          auto lj = lagged_[j].data();
          for (std::size_t p = 0; p < n; ++p) f[p] += w * lj[p];
        }
        fft.forward(f);
      }

      solve_modes(tau);

      double residual = 0.0;
      double knorm = 0.0;
      for (int i = 0; i < s; ++i) {
        auto next = next_[i].data();
        std::copy(khat_[i].data().begin(), khat_[i].data().end(), next.begin());
        fft.inverse(next);
        residual = std::max(residual, detail::max_abs_diff(next, work_.k[i].data()));
        knorm = std::max(knorm, norm_inf(next_[i]));
        std::swap(work_.k[i], next_[i]);
      }
      stats.iterations = it;
      stats.residual = residual;
      if (!std::isfinite(residual) || !std::isfinite(knorm))
        throw NumericalBlowup("step: non-finite stage slopes at iteration " + std::to_string(it));
      if (residual < opts_.tol * std::max(1.0, knorm)) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw StepDiverged("step: fixed-point iteration did not converge in " +
                             std::to_string(opts_.max_iter) + " iterations (residual " +
                             std::to_string(stats.residual) + ")",
                         stats.residual, stats.iterations);
    }

    update_stage_scalars(psi, state.q, tau);

    SavState out{psi, state.q};
    auto od = out.psi.data();
    for (int i = 0; i < s; ++i) {
      const double w = tau * tab_.b[i];
      auto kd = work_.k[i].data();
      for (std::size_t p = 0; p < n; ++p) od[p] += w * kd[p];
      out.q += w * work_.l[i];
    }
    if (!out.psi.all_finite() || !std::isfinite(out.q))
      throw NumericalBlowup("step: non-finite result");
    have_previous_ = true;
    return {std::move(out), stats};
  }

 private:
  void prepare_work(const GridPtr& gp) {
    const int s = tab_.s;
    if (static_cast<int>(work_.k.size()) == s) return;
    auto fields = [&] { return std::vector<Field>(static_cast<std::size_t>(s), Field(gp)); };
    work_.k = fields();
    work_.psi_stages = fields();
    work_.phi = fields();
    work_.fhat = fields();
    work_.l.assign(s, 0.0);
    work_.q_stages.assign(s, 0.0);
    khat_ = fields();
    next_ = fields();
    lagged_ = fields();
  }

  // Psi_i, Phi_i, l_i and Q_i from the current slopes.
  void update_stage_scalars(const Field& psi, double q, double tau) {
    const int s = tab_.s;
    const double beta = op_->params().beta;
    const double c0 = op_->params().c0;
    const double vol = op_->grid().cell_volume();
    const std::size_t n = psi.size();
    for (int i = 0; i < s; ++i) {
      auto st = work_.psi_stages[i].data();
      std::copy(psi.data().begin(), psi.data().end(), st.begin());
      for (int j = 0; j < s; ++j) {
        const double w = tau * tab_(i, j);
        auto kj = work_.k[j].data();
        for (std::size_t p = 0; p < n; ++p) st[p] += w * kj[p];
      }
      auto ph = work_.phi[i].data();
      if (beta == 0.0) {
        std::fill(ph.begin(), ph.end(), Complex(0.0, 0.0));
        work_.l[i] = 0.0;
        continue;
      }
      double quartic = 0.0;
      for (std::size_t p = 0; p < n; ++p) {
        const double m = std::norm(st[p]);
        quartic += m * m;
      }
      const double inv = 1.0 / std::sqrt(quartic * vol + c0);
      double acc = 0.0;
      auto ki = work_.k[i].data();
      for (std::size_t p = 0; p < n; ++p) {
        ph[p] = (std::norm(st[p]) * inv) * st[p];
        acc += (ki[p] * std::conj(ph[p])).real();
      }
      work_.l[i] = 2.0 * acc * vol;
    }
    for (int i = 0; i < s; ++i) {
      double acc = q;
      for (int j = 0; j < s; ++j) acc += tau * tab_(i, j) * work_.l[j];
      work_.q_stages[i] = acc;
    }
  }

  // Per-mode solve of (I - (i tau/2) lambda A) k~ = f~, written into khat_.
  void solve_modes(double tau) {
    const int s = tab_.s;
    const auto& sym = op_->grid().laplacian_symbol();
    std::array<Complex, kMaxStages * kMaxStages> m{};
    std::array<Complex, kMaxStages> rhs{};
    for (std::size_t p = 0; p < sym.size(); ++p) {
      const Complex z(0.0, -0.5 * tau * sym[p]);
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) m[i * s + j] = z * tab_(i, j);
        m[i * s + i] += 1.0;
        rhs[i] = work_.fhat[i][p];
      }
      detail::solve_small(s, m, rhs);
      for (int i = 0; i < s; ++i) khat_[i][p] = rhs[i];
    }
  }

  std::shared_ptr<const GpOperator> op_;
  ButcherTableau tab_;
  SolverOptions opts_;
  StageWork work_;
  std::vector<Field> khat_;
  std::vector<Field> next_;
  std::vector<Field> lagged_;
  bool have_previous_ = false;
};

inline std::pair<SavState, StepStats> step(const GpParams& params, const ButcherTableau& tab,
                                           const SolverOptions& opts, const SavState& state,
                                           double tau) {
  SavStepper stepper(params, state.psi.grid_ptr(), tab, opts);
  return stepper.step(state, tau);
}

/// Called after every step with (step index starting at 1, time, state, stats).
using StepObserver =
    std::function<void(std::size_t, double, const SavState&, const StepStats&)>;

inline SavState evolve(SavStepper& stepper, SavState state, double tau, std::size_t n_steps,
                       const StepObserver& observer = {}) {
  for (std::size_t n = 1; n <= n_steps; ++n) {
    StepStats stats;
    try {
      auto result = stepper.step(state, tau);
      state = std::move(result.first);
      stats = result.second;
    } catch (const StepDiverged& e) {
      throw StepDiverged("step " + std::to_string(n) + ": " + e.what(), e.residual(),
                         e.iterations(), static_cast<std::ptrdiff_t>(n));
    } catch (const NumericalBlowup& e) {
      throw NumericalBlowup("step " + std::to_string(n) + ": " + e.what(),
                            static_cast<std::ptrdiff_t>(n));
    }
    if (observer) observer(n, static_cast<double>(n) * tau, state, stats);
  }
  return state;
}

inline SavState evolve(const GpParams& params, const ButcherTableau& tab,
                       const SolverOptions& opts, SavState state0, double tau,
                       std::size_t n_steps, const StepObserver& observer = {}) {
  if (n_steps == 0) return state0;
  SavStepper stepper(params, state0.psi.grid_ptr(), tab, opts);
  return evolve(stepper, std::move(state0), tau, n_steps, observer);
}

}  // namespace gpsav
