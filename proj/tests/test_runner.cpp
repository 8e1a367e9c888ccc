#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "gpsav/runner.hpp"
#include "test_util.hpp"

using namespace gpsav;
namespace fs = std::filesystem;

namespace {
constexpr double kPi = std::numbers::pi;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gpsav_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig plane_wave_config(const fs::path& out) {
  auto c = parse_config(
      "grid.dim = 1\ngrid.sizes = 8\ngrid.lower = 0\ngrid.upper = 6.283185307179586\n"
      "time.tau = 0.01\ntime.t_final = 1\ntime.stages = 3\n"
      "model.beta = 0\npotential.scale = 0\n"
      "initial.kind = plane_wave\ninitial.wave_numbers = 1\n"
      "output.snapshot_times = 0.5, 0.504, 2\n");
  c.output_dir = out.string();
  return c;
}

std::string strip_run_lines(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("# run.", 0) != 0) out << line << '\n';
  return out.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GPSAV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
}  // namespace

TEST(InitialData, GaussianMassPerDimension) {
  const double want[] = {1.0, 0.5, 0.25};
  for (int d = 1; d <= 3; ++d) {
    std::vector<std::size_t> n(d, 32);
    std::vector<double> lo(d, -8.0), hi(d, 8.0);
    auto g = make_grid(d, n, lo, hi);
    EXPECT_NEAR(mass(make_initial_field(InitialSpec{}, g)), want[d - 1], 1e-10) << d;
  }
}

TEST(PlanSteps, SnapsOrWarns) {
  EXPECT_EQ(plan_steps(3.0, 0.01).steps, 300u);
  EXPECT_FALSE(plan_steps(3.0, 0.01).warning.has_value());
  EXPECT_EQ(plan_steps(3.0, 0.015).steps, 200u);
  const auto p = plan_steps(1.0, 0.3);
  EXPECT_EQ(p.steps, 3u);
  EXPECT_TRUE(p.warning.has_value());
  EXPECT_EQ(plan_steps(0.0, 0.1).steps, 0u);
}

TEST(Run, PlaneWaveMatchesAnalyticRotation) {
  const auto out = scratch("plane");
  const auto c = plane_wave_config(out);
  const RunResult r = run(c);
  ASSERT_EQ(r.status, ExitCode::ok) << r.message;
  ASSERT_TRUE(r.final_state.has_value());
  auto g = make_grid(c);
  const Field exact = Field::sample(g, [](auto x) { return std::polar(1.0, x[0] - 0.5); });
  EXPECT_LE(field_error(r.final_state->psi, exact), 1e-9);
  const Snapshot fin = read_snapshot((out / "final.bin").string());
  EXPECT_EQ(fin.header.time, 1.0);
  EXPECT_LE(field_error(field_from_snapshot(fin, g), exact), 1e-9);
}

TEST(Run, ArtifactsAndSnapshotSnapping) {
  const auto out = scratch("artifacts");
  auto c = plane_wave_config(out);
  c.diag_stride = 30;
  run(c);
  // 0.5 and 0.504 both snap to step 50; 2 clamps to the last step
  EXPECT_TRUE(fs::exists(out / "snapshot_000050.bin"));
  EXPECT_TRUE(fs::exists(out / "snapshot_000100.bin"));
  EXPECT_FALSE(fs::exists(out / "snapshot_000000.bin"));
  const std::string manifest = read_text_file((out / "manifest.txt").string());
  EXPECT_NE(manifest.find("# snapshot = snapshot_000050.bin step 50 t 0.5 requested 0.5,0.504"),
            std::string::npos);
  EXPECT_NE(manifest.find("# tableau.s = 3"), std::string::npos);
  EXPECT_NE(manifest.find("# gpsav.version = "), std::string::npos);
  EXPECT_NE(manifest.find("# run.wall_clock_seconds = "), std::string::npos);
  // The manifest is itself a config.
  EXPECT_EQ(to_text(parse_config(manifest)), to_text(c));

  std::istringstream csv(read_text_file((out / "diagnostics.csv").string()));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "step,t,mass,mass_err,E_h,quad_err,H_h,ham_err,q,fp_iters,fp_residual");
  std::vector<std::string> steps;
  while (std::getline(csv, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 10);
    steps.push_back(line.substr(0, line.find(',')));
  }
  EXPECT_EQ(steps, (std::vector<std::string>{"0", "30", "60", "90", "100"}));
}

TEST(Run, ZeroFinalTimeWritesManifestAndInitialSnapshot) {
  const auto out = scratch("zero");
  auto c = plane_wave_config(out);
  c.t_final = 0.0;
  c.snapshot_times.clear();
  const RunResult r = run(c);
  EXPECT_EQ(r.status, ExitCode::ok);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(out)) files.push_back(e.path().filename().string());
  std::sort(files.begin(), files.end());
  EXPECT_EQ(files, (std::vector<std::string>{"manifest.txt", "snapshot_000000.bin"}));
}

TEST(Run, DeterministicArtifacts) {
  auto c = parse_config(*preset_text("gaussian-2d"));
  c.sizes = {16, 16};
  c.t_final = 0.2;
  c.snapshot_times = {0.1};
  std::vector<fs::path> dirs = {scratch("det_a"), scratch("det_b")};
  for (const auto& d : dirs) {
    c.output_dir = d.string();
    ASSERT_EQ(run(c).status, ExitCode::ok);
  }
  for (const char* f : {"diagnostics.csv", "snapshot_000010.bin", "final.bin"}) {
    EXPECT_EQ(read_text_file((dirs[0] / f).string()), read_text_file((dirs[1] / f).string())) << f;
  }
  const auto m0 = read_text_file((dirs[0] / "manifest.txt").string());
  const auto m1 = read_text_file((dirs[1] / "manifest.txt").string());
  // output.dir differs by construction
  auto drop_dir = [](std::string s) {
    const auto a = s.find("output.dir = ");
    return s.erase(a, s.find('\n', a) - a);
  };
  EXPECT_EQ(drop_dir(strip_run_lines(m0)), drop_dir(strip_run_lines(m1)));
}

TEST(Run, InitialStateFromFile) {
  const auto out = scratch("fromfile");
  fs::create_directories(out);
  auto g = make_grid(1, {8}, {0}, {2 * kPi});
  const Field psi = Field::sample(g, [](auto x) { return std::polar(0.7, 2 * x[0]); });
  write_snapshot((out / "init.bin").string(), psi, 5.0, 42.0);
  auto c = plane_wave_config(out / "run");
  c.initial.kind = InitialKind::from_file;
  c.initial.path = (out / "init.bin").string();
  c.beta = 3.0;
  c.t_final = 0.1;
  c.snapshot_times.clear();
  const RunResult r = run(c);
  ASSERT_EQ(r.status, ExitCode::ok);
  // q is re-derived from the loaded field, not taken from the file
  EXPECT_NEAR(r.drift.q_series.front(), std::sqrt(std::pow(0.7, 4) * 2 * kPi + 1.0), 1e-13);
}

TEST(Run, DivergedStepIsReported) {
  const auto out = scratch("diverge");
  auto c = plane_wave_config(out);
  c.initial.kind = InitialKind::gaussian;
  c.beta = 1e4;
  c.tau = 0.1;
  c.solver.max_iter = 2;
  const RunResult r = run(c);
  EXPECT_EQ(r.status, ExitCode::step_diverged);
  EXPECT_EQ(r.steps_done, 0u);
  EXPECT_NE(read_text_file((out / "manifest.txt").string()).find("# status = step 1"), std::string::npos);
}

TEST(ConvergenceStudy, MidpointIsSecondOrder) {
  auto c = parse_config(*preset_text("gaussian-2d"));
  c.sizes = {16, 16};
  c.t_final = 0.6;
  c.stages = 1;
  const auto t = convergence_study(c, {0.02, 0.015, 0.01, 0.005});
  ASSERT_EQ(t.rates.size(), 4u);
  EXPECT_TRUE(std::isnan(t.rates[0]));
  for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(t.rates[i], 2.0, 0.2) << i;
  EXPECT_NEAR(t.tau_ref, 0.0005, 1e-18);
  const std::string csv = convergence_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "stages,tau,error_inf,rate");
}

TEST(ConvergenceStudy, LadderValidation) {
  auto c = parse_config(*preset_text("gaussian-2d"));
  EXPECT_THROW(convergence_study(c, {0.02, 0.01}), ConfigError);
  EXPECT_THROW(convergence_study(c, {0.02, 0.03, 0.01}), ConfigError);
}

TEST(Cli, ExitCodes) {
  const auto out = scratch("cli");
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("run --preset no-such-preset"), 2);
  EXPECT_EQ(run_cli("run --preset gaussian-2d --override model.betta=1"), 2);
  EXPECT_EQ(run_cli("run --config /nonexistent/file.cfg"), 3);
  EXPECT_EQ(run_cli("inspect /nonexistent/file.bin"), 3);
  const std::string small = "--preset gaussian-2d --override grid.sizes=8,8 --override time.t_final=0.05 --output " +
                            out.string();
  EXPECT_EQ(run_cli("run " + small), 0);
  EXPECT_TRUE(fs::exists(out / "final.bin"));
  EXPECT_EQ(run_cli("inspect " + (out / "final.bin").string()), 0);
  EXPECT_EQ(run_cli("run " + small + " --override model.beta=1e4 --override time.tau=0.05"
                    " --override solver.max_iter=2"),
            4);
}
