#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gpsav/gpsav.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string output;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Experiment file (key = value lines)");
  cmd->add_option("--preset", f.preset, "Built-in experiment, applied before --config");
  cmd->add_option("--output", f.output, "Output directory (overrides output.dir)");
  cmd->add_option("--override", f.overrides, "key=value, applied last (repeatable)");
}

gpsav::ExperimentConfig load(const CommonFlags& f) {
  gpsav::ConfigMap m;
  if (!f.preset.empty()) {
    auto text = gpsav::preset_text(f.preset);
    if (!text) throw gpsav::ConfigError("unknown preset '" + f.preset + "'");
    gpsav::merge_config_text(m, *text, "preset:" + f.preset);
  }
  if (!f.config_path.empty())
    gpsav::merge_config_text(m, gpsav::read_text_file(f.config_path), f.config_path);
  for (const auto& kv : f.overrides) gpsav::apply_override(m, kv);
  if (!f.output.empty()) m["output.dir"] = f.output;
  return gpsav::config_from_map(m);
}

int inspect(const std::string& path) {
  const gpsav::Snapshot snap = gpsav::read_snapshot(path);
  const auto& h = snap.header;
  std::printf("file   %s\n", path.c_str());
  std::printf("dim    %u\n", h.dim);
  std::printf("sizes  %u %u %u\n", h.sizes[0], h.sizes[1], h.sizes[2]);
  double cell = 1.0;
  for (unsigned w = 0; w < h.dim; ++w) {
    std::printf("axis%u  [%.17g, %.17g)\n", w, h.lower[w], h.upper[w]);
    cell *= (h.upper[w] - h.lower[w]) / h.sizes[w];
  }
  std::printf("time   %.17g\n", h.time);
  std::printf("q      %.17g\n", h.q);
  double mass = 0.0;
  double peak = 0.0;
  for (const auto& z : snap.values) {
    mass += std::norm(z);
    peak = std::max(peak, std::abs(z));
  }
  std::printf("mass   %.17g\n", mass * cell);
  std::printf("max|psi| %.17g\n", peak);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mass- and energy-conserving Gauss-SAV solver for the rotating Gross-Pitaevskii equation"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 ok, 1 usage, 2 invalid config, 3 I/O failure, 4 fixed-point step diverged,\n"
      "5 numerical blow-up. GPSAV_THREADS caps FFT threads.\n"
      "Presets: gaussian-3d, gaussian-2d, vortex-lattice-2d, vortex-lines-3d "
      "(vortex presets need ground_state.bin).");

  CommonFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Integrate one experiment and write diagnostics and snapshots");
  add_common(run_cmd, run_flags);

  CommonFlags conv_flags;
  auto* conv_cmd = app.add_subcommand("converge", "Temporal self-convergence study over converge.ladder");
  add_common(conv_cmd, conv_flags);

  std::string snap_path;
  auto* insp_cmd = app.add_subcommand("inspect", "Print a snapshot header and summary");
  insp_cmd->add_option("file", snap_path, "Snapshot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(gpsav::ExitCode::usage);
  }

  try {
    if (*insp_cmd) return inspect(snap_path);

    if (*run_cmd) {
      const auto cfg = load(run_flags);
      const auto res = gpsav::run(cfg);
      if (res.status != gpsav::ExitCode::ok) {
        std::cerr << "gpsav: " << res.message << "\n";
        return static_cast<int>(res.status);
      }
      std::printf("steps %zu  max mass_err %.3e  max quad_err %.3e  max ham_err %.3e\n",
                  res.steps_done, res.drift.max_mass_err(), res.drift.max_quad_err(),
                  res.drift.max_ham_err());
      std::printf("output %s\n", res.output_dir.string().c_str());
      return 0;
    }

    if (*conv_cmd) {
      const auto cfg = load(conv_flags);
      const auto table = gpsav::convergence_study(cfg, cfg.ladder);
      std::filesystem::create_directories(cfg.output_dir);
      const auto path = std::filesystem::path(cfg.output_dir) / "convergence.csv";
      const std::string csv = gpsav::convergence_csv(table);
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!(out << csv)) throw gpsav::IoError("cannot write " + path.string());
      std::printf("reference: s=3, tau=%g\n", table.tau_ref);
      std::printf("%10s %14s %8s\n", "tau", "||e||_inf", "rate");
      for (std::size_t i = 0; i < table.taus.size(); ++i) {
        if (std::isnan(table.rates[i]))
          std::printf("%10g %14.4e %8s\n", table.taus[i], table.errors[i], "*");
        else
          std::printf("%10g %14.4e %8.2f\n", table.taus[i], table.errors[i], table.rates[i]);
      }
      return 0;
    }
  } catch (const gpsav::ConfigError& e) {
    std::cerr << "gpsav: config error: " << e.what() << "\n";
    return static_cast<int>(gpsav::ExitCode::config);
  } catch (const gpsav::InvalidArgument& e) {
    std::cerr << "gpsav: invalid input: " << e.what() << "\n";
    return static_cast<int>(gpsav::ExitCode::config);
  } catch (const gpsav::UnsupportedOperation& e) {
    std::cerr << "gpsav: invalid input: " << e.what() << "\n";
    return static_cast<int>(gpsav::ExitCode::config);
  } catch (const gpsav::IoError& e) {
    std::cerr << "gpsav: I/O error: " << e.what() << "\n";
    return static_cast<int>(gpsav::ExitCode::io);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "gpsav: I/O error: " << e.what() << "\n";
    return static_cast<int>(gpsav::ExitCode::io);
  } catch (const gpsav::StepDiverged& e) {
    std::cerr << "gpsav: " << e.what() << "\n";
    return static_cast<int>(gpsav::ExitCode::step_diverged);
  } catch (const gpsav::NumericalBlowup& e) {
    std::cerr << "gpsav: " << e.what() << "\n";
    return static_cast<int>(gpsav::ExitCode::numerical_blowup);
  }
  return static_cast<int>(gpsav::ExitCode::usage);
}
