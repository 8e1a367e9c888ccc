#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gpsav/config.hpp"
#include "gpsav/diagnostics.hpp"
#include "gpsav/gauss_tableau.hpp"
#include "gpsav/sav_integrator.hpp"
#include "gpsav/sav_state.hpp"
#include "gpsav/snapshot.hpp"

namespace gpsav {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes of the CLI.
enum class ExitCode : int {
  ok = 0,
  usage = 1,
  config = 2,
  io = 3,
  step_diverged = 4,
  numerical_blowup = 5,
};

inline GridPtr make_grid(const ExperimentConfig& c) {
  return make_grid(c.dim, std::span<const std::size_t>(c.sizes), std::span<const double>(c.lower),
                   std::span<const double>(c.upper));
}

/// Prefactor of the separable Gaussian psi0 = C exp(-sum gamma_w^2 x_w^2 / 2).
inline double gaussian_prefactor(int dim, const std::array<double, 3>& gammas) {
  double gp = 1.0;
  for (int w = 0; w < dim; ++w) gp *= gammas[w];
  const double pi = std::numbers::pi;
  switch (dim) {
    case 1: return std::pow(gp, 0.25) / std::pow(pi, 0.25);
    case 2: return std::pow(gp, 0.25) / (std::sqrt(2.0) * std::sqrt(pi));
    default: return std::pow(gp, 0.25) / (2.0 * std::pow(pi, 0.75));
  }
}

inline Field make_initial_field(const InitialSpec& init, const GridPtr& grid) {
  const int dim = grid->dim();
  switch (init.kind) {
    case InitialKind::gaussian: {
      const double pref = gaussian_prefactor(dim, init.gammas);
      return Field::sample(grid, [&](const std::array<double, 3>& x) {
        double v = 0.0;
        for (int w = 0; w < dim; ++w) v += init.gammas[w] * init.gammas[w] * x[w] * x[w];
        return Complex(pref * std::exp(-0.5 * v), 0.0);
      });
    }
    case InitialKind::plane_wave: {
      const Grid& g = *grid;
      return Field::sample(grid, [&](const std::array<double, 3>& x) {
        double phase = 0.0;
        for (int w = 0; w < dim; ++w) phase += init.wave_numbers[w] * g.mu(w) * x[w];
        return std::polar(init.amplitude, phase);
      });
    }
    case InitialKind::from_file: {
      const Snapshot snap = read_snapshot(init.path);
      return field_from_snapshot(snap, grid);
    }
  }
  throw ConfigError("unknown initial kind");
}

struct StepPlan {
  std::size_t steps = 0;
  double t_end = 0.0;
  std::optional<std::string> warning;
};

/// Whole steps covering t_final; a non-integral ratio is rounded down with a warning.
inline StepPlan plan_steps(double t_final, double tau) {
  StepPlan p;
  const double ratio = t_final / tau;
  const double nearest = std::round(ratio);
  if (std::abs(nearest * tau - t_final) <= 1e-12 * std::max(1.0, t_final)) {
    p.steps = static_cast<std::size_t>(nearest);
  } else {
    p.steps = static_cast<std::size_t>(std::floor(ratio));
    std::ostringstream w;
    w << "t_final " << detail::fmt_double(t_final) << " is not a multiple of tau "
      << detail::fmt_double(tau) << "; running " << p.steps << " steps";
    p.warning = w.str();
  }
  p.t_end = static_cast<double>(p.steps) * tau;
  return p;
}

inline std::string csv_header() {
  return "step,t,mass,mass_err,E_h,quad_err,H_h,ham_err,q,fp_iters,fp_residual\n";
}

inline std::string csv_row(const DriftSeries& d, std::size_t i, const StepStats& st) {
  using detail::fmt_double;
  std::ostringstream o;
  o << d.steps[i] << ',' << fmt_double(d.times[i]) << ',' << fmt_double(d.mass[i]) << ','
    << fmt_double(d.mass_err[i]) << ',' << fmt_double(d.modified_energy[i]) << ','
    << fmt_double(d.quad_err[i]) << ',' << fmt_double(d.hamiltonian[i]) << ','
    << fmt_double(d.ham_err[i]) << ',' << fmt_double(d.q_series[i]) << ',' << st.iterations << ','
    << fmt_double(st.residual) << '\n';
  return o.str();
}

struct RunResult {
  ExitCode status = ExitCode::ok;
  std::string message;
  std::size_t steps_done = 0;
  std::optional<SavState> final_state;
  DriftSeries drift;
  std::filesystem::path output_dir;
};

inline std::string snapshot_name(std::size_t step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.bin", step);
  return buf;
}

namespace detail {

inline std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + p.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + p.string());
}

}  // namespace detail

/// Integrates one experiment and writes into config.output_dir:
///   manifest.txt       config echo (a valid config file) plus '#'-prefixed run metadata
///   diagnostics.csv    one row per diag_stride steps, plus step 0 and the last step
///   snapshot_NNNNNN.bin at each requested time (snapped to the nearest step)
///   final.bin          state after the last step
/// With zero steps only the manifest and snapshot_000000.bin are written.
/// Config and I/O problems are thrown; solver failures are reported in the result.
inline RunResult run(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  const auto wall_start = std::chrono::steady_clock::now();
  const std::string started = detail::utc_now();

  RunResult result;
  result.output_dir = config.output_dir;
  std::error_code ec;
  fs::create_directories(result.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.output_dir + ": " + ec.message());

  const GridPtr grid = make_grid(config);
  const GpParams params = config.params();
  const ButcherTableau tab = gauss_tableau(config.stages);
  auto op = std::make_shared<const GpOperator>(params, grid);
  SavState state = init_state(params, make_initial_field(config.initial, grid));
  const StepPlan plan = plan_steps(config.t_final, config.tau);

  std::map<std::size_t, std::vector<double>> snapshots;  // step -> requested times
  for (double t : config.snapshot_times) {
    auto s = static_cast<std::size_t>(std::llround(t / config.tau));
    snapshots[std::min(s, plan.steps)].push_back(t);
  }
  if (plan.steps == 0) snapshots[0];

  auto write_snap = [&](std::size_t step, const SavState& s) {
    write_snapshot((result.output_dir / snapshot_name(step)).string(), s.psi,
                   static_cast<double>(step) * config.tau, s.q);
  };

  std::string csv;
  if (plan.steps > 0) csv = csv_header();
  result.drift.append(*op, 0, 0.0, state);
  if (plan.steps > 0) csv += csv_row(result.drift, 0, StepStats{});
  if (snapshots.count(0)) write_snap(0, state);

  SavStepper stepper(op, tab, config.solver);
  try {
    state = evolve(stepper, std::move(state), config.tau, plan.steps,
                   [&](std::size_t n, double t, const SavState& s, const StepStats& st) {
                     result.steps_done = n;
                     if (n % config.diag_stride == 0 || n == plan.steps) {
                       result.drift.append(*op, n, t, s);
                       csv += csv_row(result.drift, result.drift.size() - 1, st);
                     }
                     if (snapshots.count(n)) write_snap(n, s);
                   });
    result.final_state = state;
  } catch (const StepDiverged& e) {
    result.status = ExitCode::step_diverged;
    result.message = e.what();
  } catch (const NumericalBlowup& e) {
    result.status = ExitCode::numerical_blowup;
    result.message = e.what();
  }

  if (plan.steps > 0) {
    detail::write_text(result.output_dir / "diagnostics.csv", csv);
    if (result.final_state) {
      write_snapshot((result.output_dir / "final.bin").string(), result.final_state->psi,
                     plan.t_end, result.final_state->q);
    }
  }

  using detail::fmt_double;
  using detail::join;
  std::ostringstream m;
  m << to_text(config);
  m << "# gpsav.version = " << kVersion << "\n";
  m << "# status = " << (result.status == ExitCode::ok ? "ok" : result.message) << "\n";
  m << "# steps = " << plan.steps << "\n";
  m << "# steps_done = " << result.steps_done << "\n";
  m << "# t_end = " << fmt_double(plan.t_end) << "\n";
  if (plan.warning) m << "# warning = " << *plan.warning << "\n";
  auto d = [](double v) { return fmt_double(v); };
  m << "# tableau.s = " << tab.s << "\n";
  m << "# tableau.c = " << join(tab.c, d) << "\n";
  m << "# tableau.b = " << join(tab.b, d) << "\n";
  m << "# tableau.a = " << join(tab.a, d) << "\n";
  for (const auto& [step, times] : snapshots) {
    m << "# snapshot = " << snapshot_name(step) << " step " << step << " t "
      << fmt_double(static_cast<double>(step) * config.tau) << " requested "
      << join(times, d) << "\n";
  }
  if (!result.drift.times.empty()) {
    m << "# initial.mass = " << fmt_double(result.drift.mass.front()) << "\n";
    m << "# initial.E_h = " << fmt_double(result.drift.modified_energy.front()) << "\n";
    m << "# initial.H_h = " << fmt_double(result.drift.hamiltonian.front()) << "\n";
    m << "# max.mass_err = " << fmt_double(result.drift.max_mass_err()) << "\n";
    m << "# max.quad_err = " << fmt_double(result.drift.max_quad_err()) << "\n";
    m << "# max.ham_err = " << fmt_double(result.drift.max_ham_err()) << "\n";
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  m << "# run.started_at = " << started << "\n";
  m << "# run.wall_clock_seconds = " << fmt_double(wall) << "\n";
  detail::write_text(result.output_dir / "manifest.txt", m.str());
  return result;
}

/// Final state of a single integration without touching the filesystem.
inline SavState integrate(const ExperimentConfig& config, int stages, double tau,
                          std::size_t* iterations_total = nullptr) {
  const GridPtr grid = make_grid(config);
  const GpParams params = config.params();
  const StepPlan plan = plan_steps(config.t_final, tau);
  if (plan.warning) throw ConfigError(*plan.warning);
  SavStepper stepper(std::make_shared<const GpOperator>(params, grid), gauss_tableau(stages),
                     config.solver);
  std::size_t iters = 0;
  SavState out = evolve(stepper, init_state(params, make_initial_field(config.initial, grid)), tau,
                        plan.steps, [&](std::size_t, double, const SavState&, const StepStats& st) {
                          iters += static_cast<std::size_t>(st.iterations);
                        });
  if (iterations_total != nullptr) *iterations_total = iters;
  return out;
}

struct ConvergenceTable {
  int stages = 0;
  double tau_ref = 0.0;
  std::vector<double> taus;
  std::vector<double> errors;
  /// rates[i] pairs taus[i-1] and taus[i]; NaN where the rate is undefined.
  std::vector<double> rates;
};

/// Self-convergence study: a 3-stage reference at min(ladder)/10 on the same
/// grid, then one run per ladder step with config.stages, compared in the
/// max norm.
inline ConvergenceTable convergence_study(const ExperimentConfig& config,
                                          const std::vector<double>& ladder) {
  if (ladder.size() < 3) throw ConfigError("converge: ladder needs at least 3 step sizes");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0)) throw ConfigError("converge: ladder entries must be positive");
    if (i > 0 && !(ladder[i] < ladder[i - 1])) throw ConfigError("converge: ladder must decrease");
  }
  ConvergenceTable t;
  t.stages = config.stages;
  t.tau_ref = ladder.back() / 10.0;
  const SavState ref = integrate(config, 3, t.tau_ref);
  for (double tau : ladder) {
    const SavState s = integrate(config, config.stages, tau);
    t.taus.push_back(tau);
    t.errors.push_back(field_error(s.psi, ref.psi, Norm::inf));
  }
  t.rates.push_back(std::nan(""));
  for (std::size_t i = 1; i < t.taus.size(); ++i) {
    try {
      t.rates.push_back(convergence_rate({t.errors[i - 1], t.errors[i]}, {t.taus[i - 1], t.taus[i]})[0]);
    } catch (const UndefinedRate&) {
      t.rates.push_back(std::nan(""));
    }
  }
  return t;
}

inline std::string convergence_csv(const ConvergenceTable& t) {
  using detail::fmt_double;
  std::ostringstream o;
  o << "stages,tau,error_inf,rate\n";
  for (std::size_t i = 0; i < t.taus.size(); ++i) {
    o << t.stages << ',' << fmt_double(t.taus[i]) << ',' << fmt_double(t.errors[i]) << ','
      << (std::isnan(t.rates[i]) ? std::string("*") : fmt_double(t.rates[i])) << '\n';
  }
  return o.str();
}

}  // namespace gpsav
