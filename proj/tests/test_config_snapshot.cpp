#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "gpsav/config.hpp"
#include "gpsav/snapshot.hpp"
#include "test_util.hpp"

using namespace gpsav;
using gpsav::testing::random_field;

TEST(ParseConfig, BasicKeysAndComments) {
  const auto c = parse_config(
      "# comment\n"
      "grid.dim = 2\n"
      "grid.sizes = 16, 8   # trailing comment\n"
      "grid.lower = -4,-2\n"
      "grid.upper = 4,2\n"
      "time.tau = 0.005\n"
      "time.t_final = 0.5\n"
      "time.stages = 3\n"
      "model.beta = 20\nmodel.omega = 0.7\n"
      "initial.kind = plane_wave\ninitial.wave_numbers = 2,1\ninitial.amplitude = 0.5\n"
      "solver.initial_guess = previous_step\n");
  EXPECT_EQ(c.dim, 2);
  EXPECT_EQ(c.sizes, (std::vector<std::size_t>{16, 8}));
  EXPECT_EQ(c.lower, (std::vector<double>{-4, -2}));
  EXPECT_EQ(c.tau, 0.005);
  EXPECT_EQ(c.stages, 3);
  EXPECT_EQ(c.omega, 0.7);
  EXPECT_EQ(c.initial.kind, InitialKind::plane_wave);
  EXPECT_EQ(c.initial.wave_numbers[0], 2);
  EXPECT_EQ(c.initial.wave_numbers[1], 1);
  EXPECT_EQ(c.initial.amplitude, 0.5);
  EXPECT_EQ(c.solver.initial_guess, InitialGuess::previous_step);
  EXPECT_EQ(c.solver.tol, 1e-14);
  EXPECT_EQ(c.solver.max_iter, 200);
}

TEST(ParseConfig, UnknownKeyIsAnError) {
  EXPECT_THROW(parse_config("grid.dim = 2\nmodel.betta = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("just words\n"), ConfigError);
}

TEST(ParseConfig, Validation) {
  EXPECT_THROW(parse_config("grid.dim = 4\n"), ConfigError);
  EXPECT_THROW(parse_config("grid.dim = 1\ngrid.sizes = 7\ngrid.lower = 0\ngrid.upper = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("grid.dim = 1\ngrid.sizes = 8\ngrid.lower = 0\ngrid.upper = 1\nmodel.omega = 1\n"),
               ConfigError);
  EXPECT_THROW(parse_config("time.tau = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("time.stages = 6\n"), ConfigError);
  EXPECT_THROW(parse_config("model.c0 = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("time.tau = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("initial.kind = from_file\n"), ConfigError);
  EXPECT_THROW(parse_config("solver.initial_guess = newton\n"), ConfigError);
}

TEST(ParseConfig, OverridesApplyLast) {
  ConfigMap m;
  merge_config_text(m, *preset_text("gaussian-2d"), "preset");
  apply_override(m, "model.beta=5");
  apply_override(m, "time.stages = 3");
  const auto c = config_from_map(m);
  EXPECT_EQ(c.beta, 5.0);
  EXPECT_EQ(c.stages, 3);
  EXPECT_EQ(c.dim, 2);
  EXPECT_THROW(apply_override(m, "nonsense=1"), ConfigError);
}

TEST(Presets, AllParse) {
  for (const auto& name : preset_names()) {
    const auto text = preset_text(name);
    ASSERT_TRUE(text.has_value()) << name;
    EXPECT_NO_THROW(parse_config(*text, name)) << name;
  }
  EXPECT_FALSE(preset_text("missing").has_value());
  const auto c = parse_config(*preset_text("gaussian-3d"));
  EXPECT_EQ(c.dim, 3);
  EXPECT_EQ(c.sizes, (std::vector<std::size_t>{32, 32, 32}));
  EXPECT_EQ(c.beta, 20.0);
  EXPECT_EQ(c.omega, 0.7);
  EXPECT_EQ(c.t_final, 3.0);
}

TEST(ToText, RoundTrip) {
  auto c = parse_config(*preset_text("vortex-lattice-2d"));
  c.tau = 0.1 / 3.0;
  c.solver.tol = 3e-13;
  const std::string once = to_text(c);
  const auto back = parse_config(once);
  EXPECT_EQ(to_text(back), once);
  EXPECT_EQ(back.tau, c.tau);
  EXPECT_EQ(back.snapshot_times, c.snapshot_times);
  EXPECT_EQ(back.potential.gammas, c.potential.gammas);
}

TEST(Snapshot, HeaderLayout) {
  auto g = make_grid(2, {4, 6}, {-1, 0}, {1, 3});
  const std::string bytes = encode_snapshot(random_field(g, 1), 0.25, 1.5);
  ASSERT_EQ(bytes.size(), kSnapshotHeaderBytes + 24 * 16);
  EXPECT_EQ(std::memcmp(bytes.data(), "GPSAVFLD\0\0\0\0\0\0\0\1", 16), 0);
  std::uint32_t dim = 0, sizes[3] = {};
  std::memcpy(&dim, bytes.data() + 16, 4);
  std::memcpy(sizes, bytes.data() + 20, 12);
  EXPECT_EQ(dim, 2u);
  EXPECT_EQ(sizes[0], 4u);
  EXPECT_EQ(sizes[1], 6u);
  EXPECT_EQ(sizes[2], 1u);
  double time = 0.0, q = 0.0;
  std::memcpy(&time, bytes.data() + 32 + 48, 8);
  std::memcpy(&q, bytes.data() + 32 + 56, 8);
  EXPECT_EQ(time, 0.25);
  EXPECT_EQ(q, 1.5);
}

TEST(Snapshot, BitExactRoundTrip) {
  auto g = make_grid(3, {8, 4, 6}, {-1.1, 0.0, 2.5}, {1.3, 3.0, 7.0});
  const Field u = random_field(g, 99, 3.0);
  const auto path = (std::filesystem::temp_directory_path() / "gpsav_snapshot_rt.bin").string();
  write_snapshot(path, u, 0.1 + 0.2, 1.0 / 3.0);
  const Snapshot s = read_snapshot(path);
  EXPECT_EQ(s.header.time, 0.1 + 0.2);
  EXPECT_EQ(s.header.q, 1.0 / 3.0);
  const GridPtr g2 = grid_from_snapshot(s.header);
  EXPECT_TRUE(g2->same_as(*g));
  const Field back = field_from_snapshot(s, g);
  for (std::size_t i = 0; i < u.size(); ++i) {
    EXPECT_EQ(std::memcmp(&back[i], &u[i], sizeof(Complex)), 0);
  }
  EXPECT_EQ(encode_snapshot(back, s.header.time, s.header.q), read_text_file(path));
  std::filesystem::remove(path);
}

TEST(Snapshot, RejectsCorruptInput) {
  auto g = make_grid(1, {8}, {0}, {1});
  std::string bytes = encode_snapshot(random_field(g, 1), 0.0, 1.0);
  EXPECT_THROW(decode_snapshot(bytes.substr(0, bytes.size() - 1)), IoError);
  EXPECT_THROW(decode_snapshot(bytes + "x"), IoError);
  EXPECT_THROW(decode_snapshot(bytes.substr(0, 20)), IoError);
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_snapshot(bad), IoError);
  EXPECT_THROW(read_snapshot("/nonexistent/dir/file.bin"), IoError);
}

TEST(Snapshot, GridMismatch) {
  auto g = make_grid(1, {8}, {0}, {1});
  const Snapshot s = decode_snapshot(encode_snapshot(random_field(g, 1), 0.0, 1.0));
  EXPECT_THROW(field_from_snapshot(s, make_grid(1, {16}, {0}, {1})), InvalidArgument);
  EXPECT_THROW(field_from_snapshot(s, make_grid(1, {8}, {0}, {2})), InvalidArgument);
}
