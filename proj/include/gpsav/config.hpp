#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gpsav/error.hpp"
#include "gpsav/gp_operator.hpp"
#include "gpsav/sav_integrator.hpp"

namespace gpsav {

enum class InitialKind { gaussian, plane_wave, from_file };

struct InitialSpec {
  InitialKind kind = InitialKind::gaussian;
  std::array<double, 3> gammas{1.0, 1.0, 1.0};
  std::array<int, 3> wave_numbers{1, 0, 0};
  double amplitude = 1.0;
  std::string path;
};

/// One experiment: grid, model, time stepping, outputs.
struct ExperimentConfig {
  int dim = 3;
  std::vector<std::size_t> sizes{32, 32, 32};
  std::vector<double> lower{-8.0, -8.0, -8.0};
  std::vector<double> upper{8.0, 8.0, 8.0};
  double tau = 0.01;
  double t_final = 1.0;
  int stages = 2;
  double beta = 0.0;
  double omega = 0.0;
  double c0 = 1.0;
  PotentialSpec potential = PotentialSpec::harmonic();
  InitialSpec initial;
  std::vector<double> snapshot_times;
  std::string output_dir = "gpsav_out";
  std::size_t diag_stride = 1;
  SolverOptions solver;
  std::vector<double> ladder{0.02, 0.015, 0.01, 0.005};

  GpParams params() const { return GpParams{beta, omega, potential, c0}; }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

inline long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

inline std::vector<double> parse_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_double(key, s));
  return out;
}

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const T& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += fmt(items[i]);
  }
  return out;
}

template <typename T, std::size_t N>
std::array<T, N> to_array3(const std::string& key, const std::vector<T>& v, T fill) {
  if (v.empty() || v.size() > N) throw ConfigError(key + ": expected 1 to 3 entries");
  std::array<T, N> out;
  out.fill(fill);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

}  // namespace detail

/// Every key the config format accepts, in canonical order.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "grid.dim",          "grid.sizes",           "grid.lower",         "grid.upper",
      "time.tau",          "time.t_final",         "time.stages",        "model.beta",
      "model.omega",       "model.c0",             "potential.kind",     "potential.gammas",
      "potential.scale",   "potential.path",       "initial.kind",       "initial.gammas",
      "initial.wave_numbers", "initial.amplitude", "initial.path",       "output.dir",
      "output.snapshot_times", "output.diag_stride", "solver.tol",       "solver.max_iter",
      "solver.initial_guess", "converge.ladder"};
  return keys;
}

/// Flat "section.key = value" text. '#' starts a comment.
using ConfigMap = std::map<std::string, std::string>;

inline void merge_config_text(ConfigMap& into, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  const auto& keys = config_keys();
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    into[key] = value;
  }
}

/// Applies a single "key=value" override.
inline void apply_override(ConfigMap& into, const std::string& kv) {
  merge_config_text(into, kv, "--override");
}

inline ExperimentConfig config_from_map(const ConfigMap& m) {
  using namespace detail;
  ExperimentConfig c;
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = m.find(k);
    if (it == m.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("grid.dim")) c.dim = static_cast<int>(parse_int("grid.dim", *v));
  if (c.dim < 1 || c.dim > 3) throw ConfigError("grid.dim must be 1, 2 or 3");
  if (auto v = get("grid.sizes")) {
    c.sizes.clear();
    for (const auto& s : split_list(*v)) {
      const auto n = parse_int("grid.sizes", s);
      if (n < 1) throw ConfigError("grid.sizes: entries must be positive");
      c.sizes.push_back(static_cast<std::size_t>(n));
    }
  }
  if (auto v = get("grid.lower")) c.lower = parse_doubles("grid.lower", *v);
  if (auto v = get("grid.upper")) c.upper = parse_doubles("grid.upper", *v);
  c.sizes.resize(std::min<std::size_t>(c.sizes.size(), 3));
  if (c.sizes.size() < static_cast<std::size_t>(c.dim) || c.lower.size() < static_cast<std::size_t>(c.dim) ||
      c.upper.size() < static_cast<std::size_t>(c.dim))
    throw ConfigError("grid.sizes/lower/upper need one entry per axis (grid.dim = " +
                      std::to_string(c.dim) + ")");
  c.sizes.resize(c.dim);
  c.lower.resize(c.dim);
  c.upper.resize(c.dim);
  for (int w = 0; w < c.dim; ++w) {
    if (c.sizes[w] < 4 || c.sizes[w] % 2 != 0) throw ConfigError("grid.sizes: entries must be even and >= 4");
    if (!(c.upper[w] > c.lower[w])) throw ConfigError("grid.upper must exceed grid.lower");
  }

  if (auto v = get("time.tau")) c.tau = parse_double("time.tau", *v);
  if (auto v = get("time.t_final")) c.t_final = parse_double("time.t_final", *v);
  if (auto v = get("time.stages")) c.stages = static_cast<int>(parse_int("time.stages", *v));
  if (!(c.tau > 0.0)) throw ConfigError("time.tau must be positive");
  if (!(c.t_final >= 0.0)) throw ConfigError("time.t_final must be >= 0");
  if (c.stages < 1 || c.stages > kMaxStages) throw ConfigError("time.stages must be in [1, 5]");

  if (auto v = get("model.beta")) c.beta = parse_double("model.beta", *v);
  if (auto v = get("model.omega")) c.omega = parse_double("model.omega", *v);
  if (auto v = get("model.c0")) c.c0 = parse_double("model.c0", *v);
  if (!(c.c0 > 0.0)) throw ConfigError("model.c0 must be positive");
  if (c.omega != 0.0 && c.dim < 2) throw ConfigError("model.omega != 0 needs grid.dim >= 2");

  if (auto v = get("potential.kind")) {
    if (*v == "harmonic") c.potential.kind = PotentialKind::harmonic;
    else if (*v == "from_file") c.potential.kind = PotentialKind::from_file;
    else throw ConfigError("potential.kind must be harmonic or from_file");
  }
  if (auto v = get("potential.gammas"))
    c.potential.gammas = to_array3<double, 3>("potential.gammas", parse_doubles("potential.gammas", *v), 1.0);
  if (auto v = get("potential.scale")) c.potential.scale = parse_double("potential.scale", *v);
  if (auto v = get("potential.path")) c.potential.path = *v;
  if (c.potential.kind == PotentialKind::from_file && c.potential.path.empty())
    throw ConfigError("potential.path is required when potential.kind = from_file");

  if (auto v = get("initial.kind")) {
    if (*v == "gaussian") c.initial.kind = InitialKind::gaussian;
    else if (*v == "plane_wave") c.initial.kind = InitialKind::plane_wave;
    else if (*v == "from_file") c.initial.kind = InitialKind::from_file;
    else throw ConfigError("initial.kind must be gaussian, plane_wave or from_file");
  }
  if (auto v = get("initial.gammas"))
    c.initial.gammas = to_array3<double, 3>("initial.gammas", parse_doubles("initial.gammas", *v), 1.0);
  if (auto v = get("initial.wave_numbers")) {
    std::vector<int> k;
    for (const auto& s : split_list(*v)) k.push_back(static_cast<int>(parse_int("initial.wave_numbers", s)));
    c.initial.wave_numbers = to_array3<int, 3>("initial.wave_numbers", k, 0);
  }
  if (auto v = get("initial.amplitude")) c.initial.amplitude = parse_double("initial.amplitude", *v);
  if (auto v = get("initial.path")) c.initial.path = *v;
  if (c.initial.kind == InitialKind::from_file && c.initial.path.empty())
    throw ConfigError("initial.path is required when initial.kind = from_file");

  if (auto v = get("output.dir")) c.output_dir = *v;
  if (auto v = get("output.snapshot_times")) c.snapshot_times = parse_doubles("output.snapshot_times", *v);
  for (double t : c.snapshot_times)
    if (t < 0.0) throw ConfigError("output.snapshot_times must be >= 0");
  if (auto v = get("output.diag_stride")) {
    const auto n = parse_int("output.diag_stride", *v);
    if (n < 1) throw ConfigError("output.diag_stride must be >= 1");
    c.diag_stride = static_cast<std::size_t>(n);
  }

  if (auto v = get("solver.tol")) c.solver.tol = parse_double("solver.tol", *v);
  if (auto v = get("solver.max_iter")) c.solver.max_iter = static_cast<int>(parse_int("solver.max_iter", *v));
  if (auto v = get("solver.initial_guess")) {
    if (*v == "explicit_rhs") c.solver.initial_guess = InitialGuess::explicit_rhs;
    else if (*v == "previous_step") c.solver.initial_guess = InitialGuess::previous_step;
    else throw ConfigError("solver.initial_guess must be explicit_rhs or previous_step");
  }
  if (!(c.solver.tol > 0.0)) throw ConfigError("solver.tol must be positive");
  if (c.solver.max_iter < 1) throw ConfigError("solver.max_iter must be >= 1");

  if (auto v = get("converge.ladder")) c.ladder = parse_doubles("converge.ladder", *v);
  return c;
}

inline ExperimentConfig parse_config(const std::string& text, const std::string& origin = "config") {
  ConfigMap m;
  merge_config_text(m, text, origin);
  return config_from_map(m);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Canonical key = value rendering; parse_config(to_text(c)) reproduces c.
inline std::string to_text(const ExperimentConfig& c) {
  using detail::fmt_double;
  using detail::join;
  auto d = [](double v) { return fmt_double(v); };
  auto sz = [](std::size_t v) { return std::to_string(v); };
  auto in = [](int v) { return std::to_string(v); };
  std::ostringstream o;
  o << "grid.dim = " << c.dim << "\n";
  o << "grid.sizes = " << join(c.sizes, sz) << "\n";
  o << "grid.lower = " << join(c.lower, d) << "\n";
  o << "grid.upper = " << join(c.upper, d) << "\n";
  o << "time.tau = " << d(c.tau) << "\n";
  o << "time.t_final = " << d(c.t_final) << "\n";
  o << "time.stages = " << c.stages << "\n";
  o << "model.beta = " << d(c.beta) << "\n";
  o << "model.omega = " << d(c.omega) << "\n";
  o << "model.c0 = " << d(c.c0) << "\n";
  o << "potential.kind = " << (c.potential.kind == PotentialKind::harmonic ? "harmonic" : "from_file") << "\n";
  o << "potential.gammas = " << join(c.potential.gammas, d) << "\n";
  o << "potential.scale = " << d(c.potential.scale) << "\n";
  if (!c.potential.path.empty()) o << "potential.path = " << c.potential.path << "\n";
  const char* ik = c.initial.kind == InitialKind::gaussian     ? "gaussian"
                   : c.initial.kind == InitialKind::plane_wave ? "plane_wave"
                                                               : "from_file";
  o << "initial.kind = " << ik << "\n";
  o << "initial.gammas = " << join(c.initial.gammas, d) << "\n";
  o << "initial.wave_numbers = " << join(c.initial.wave_numbers, in) << "\n";
  o << "initial.amplitude = " << d(c.initial.amplitude) << "\n";
  if (!c.initial.path.empty()) o << "initial.path = " << c.initial.path << "\n";
  o << "output.dir = " << c.output_dir << "\n";
  o << "output.snapshot_times = " << join(c.snapshot_times, d) << "\n";
  o << "output.diag_stride = " << c.diag_stride << "\n";
  o << "solver.tol = " << d(c.solver.tol) << "\n";
  o << "solver.max_iter = " << c.solver.max_iter << "\n";
  o << "solver.initial_guess = "
    << (c.solver.initial_guess == InitialGuess::explicit_rhs ? "explicit_rhs" : "previous_step") << "\n";
  o << "converge.ladder = " << join(c.ladder, d) << "\n";
  return o.str();
}

/// Built-in experiment descriptions, returned as config text.
inline std::optional<std::string> preset_text(const std::string& name) {
  if (name == "gaussian-3d") {
    return "grid.dim = 3\ngrid.sizes = 32,32,32\ngrid.lower = -8,-8,-8\ngrid.upper = 8,8,8\n"
           "time.tau = 0.01\ntime.t_final = 3\ntime.stages = 2\n"
           "model.beta = 20\nmodel.omega = 0.7\nmodel.c0 = 1\n"
           "potential.kind = harmonic\npotential.gammas = 1,1,1\n"
           "initial.kind = gaussian\ninitial.gammas = 1,1,1\n"
           "output.dir = gaussian-3d\n";
  }
  if (name == "gaussian-2d") {
    return "grid.dim = 2\ngrid.sizes = 32,32\ngrid.lower = -8,-8\ngrid.upper = 8,8\n"
           "time.tau = 0.01\ntime.t_final = 3\ntime.stages = 2\n"
           "model.beta = 20\nmodel.omega = 0.7\nmodel.c0 = 1\n"
           "potential.kind = harmonic\npotential.gammas = 1,1\n"
           "initial.kind = gaussian\ninitial.gammas = 1,1\n"
           "output.dir = gaussian-2d\n";
  }
  if (name == "vortex-lattice-2d") {
    // Needs a ground state computed elsewhere (ground_state.bin).
    return "grid.dim = 2\ngrid.sizes = 128,128\ngrid.lower = -16,-16\ngrid.upper = 16,16\n"
           "time.tau = 0.001\ntime.t_final = 10\ntime.stages = 2\n"
           "model.beta = 1000\nmodel.omega = 0.9\nmodel.c0 = 1\n"
           "potential.kind = harmonic\npotential.gammas = 1.4,1.4\n"
           "initial.kind = from_file\ninitial.path = ground_state.bin\n"
           "output.snapshot_times = 0,1,2.2,3.2,4.4,5.6,6.6,10\noutput.diag_stride = 100\n"
           "output.dir = vortex-lattice-2d\n";
  }
  if (name == "vortex-lines-3d") {
    // V = x^2 + y^2 + z^2/2; needs ground_state.bin.
    return "grid.dim = 3\ngrid.sizes = 64,64,64\ngrid.lower = -10,-10,-10\ngrid.upper = 10,10,10\n"
           "time.tau = 0.001\ntime.t_final = 20\ntime.stages = 2\n"
           "model.beta = 400\nmodel.omega = 0.8\nmodel.c0 = 1\n"
           "potential.kind = harmonic\npotential.gammas = 1.4142135623730951,1.4142135623730951,1\n"
           "initial.kind = from_file\ninitial.path = ground_state.bin\n"
           "output.diag_stride = 100\noutput.dir = vortex-lines-3d\n";
  }
  return std::nullopt;
}

inline std::vector<std::string> preset_names() {
  return {"gaussian-3d", "gaussian-2d", "vortex-lattice-2d", "vortex-lines-3d"};
}

}  // namespace gpsav
