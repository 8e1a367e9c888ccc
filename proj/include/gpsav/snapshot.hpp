#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "gpsav/error.hpp"
#include "gpsav/grid.hpp"

namespace gpsav {

// Binary snapshot layout (all little-endian):
//   16 bytes  magic "GPSAVFLD" + 7 zero bytes + 0x01
//   u32 dim, u32 sizes[3] (inactive axes = 1)
//   f64 lower[3], f64 upper[3], f64 time, f64 q
//   prod(sizes) pairs of f64 (re, im), x fastest

inline constexpr std::array<unsigned char, 16> kSnapshotMagic = {
    'G', 'P', 'S', 'A', 'V', 'F', 'L', 'D', 0, 0, 0, 0, 0, 0, 0, 1};

inline constexpr std::size_t kSnapshotHeaderBytes = 16 + 4 * 4 + 8 * 8;

struct SnapshotHeader {
  std::uint32_t dim = 0;
  std::array<std::uint32_t, 3> sizes{1, 1, 1};
  std::array<double, 3> lower{0, 0, 0};
  std::array<double, 3> upper{0, 0, 0};
  double time = 0.0;
  double q = 0.0;

  std::size_t point_count() const {
    return static_cast<std::size_t>(sizes[0]) * sizes[1] * sizes[2];
  }
};

struct Snapshot {
  SnapshotHeader header;
  std::vector<Complex> values;
};

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  out.append(raw, sizeof(T));
}

template <typename T>
T take(const char*& p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

}  // namespace detail

inline std::string encode_snapshot(const Field& psi, double time, double q) {
  const Grid& g = psi.grid();
  std::string out;
  out.reserve(kSnapshotHeaderBytes + psi.size() * 16);
  out.append(reinterpret_cast<const char*>(kSnapshotMagic.data()), kSnapshotMagic.size());
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  for (int w = 0; w < 3; ++w) detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.size(w)));
  for (int w = 0; w < 3; ++w) detail::put<double>(out, w < g.dim() ? g.lower(w) : 0.0);
  for (int w = 0; w < 3; ++w) detail::put<double>(out, w < g.dim() ? g.upper(w) : 0.0);
  detail::put<double>(out, time);
  detail::put<double>(out, q);
  for (const auto& z : psi.data()) {
    detail::put<double>(out, z.real());
    detail::put<double>(out, z.imag());
  }
  return out;
}

inline Snapshot decode_snapshot(const std::string& bytes) {
  if (bytes.size() < kSnapshotHeaderBytes) throw IoError("snapshot: truncated header");
  if (std::memcmp(bytes.data(), kSnapshotMagic.data(), kSnapshotMagic.size()) != 0)
    throw IoError("snapshot: bad magic");
  const char* p = bytes.data() + kSnapshotMagic.size();
  Snapshot s;
  s.header.dim = detail::take<std::uint32_t>(p);
  for (auto& n : s.header.sizes) n = detail::take<std::uint32_t>(p);
  for (auto& v : s.header.lower) v = detail::take<double>(p);
  for (auto& v : s.header.upper) v = detail::take<double>(p);
  s.header.time = detail::take<double>(p);
  s.header.q = detail::take<double>(p);
  if (s.header.dim < 1 || s.header.dim > 3) throw IoError("snapshot: invalid dim");
  for (auto n : s.header.sizes)
    if (n == 0) throw IoError("snapshot: zero axis size");
  const std::size_t n = s.header.point_count();
  if (bytes.size() != kSnapshotHeaderBytes + n * 16)
    throw IoError("snapshot: payload length " + std::to_string(bytes.size()) +
                  " does not match header (" + std::to_string(kSnapshotHeaderBytes + n * 16) + ")");
  s.values.resize(n);
  for (auto& z : s.values) {
    const double re = detail::take<double>(p);
    const double im = detail::take<double>(p);
    z = Complex(re, im);
  }
  return s;
}

inline void write_snapshot(const std::string& path, const Field& psi, double time, double q) {
  const std::string bytes = encode_snapshot(psi, time, q);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

/// Grid described by a snapshot header.
inline GridPtr grid_from_snapshot(const SnapshotHeader& h) {
  const int dim = static_cast<int>(h.dim);
  std::array<std::size_t, 3> sizes{h.sizes[0], h.sizes[1], h.sizes[2]};
  return make_grid(dim, std::span<const std::size_t>(sizes.data(), 3),
                   std::span<const double>(h.lower.data(), 3),
                   std::span<const double>(h.upper.data(), 3));
}

/// Values of a snapshot as a Field on `grid`; the snapshot geometry must match.
inline Field field_from_snapshot(const Snapshot& s, const GridPtr& grid) {
  const Grid& g = *grid;
  if (static_cast<int>(s.header.dim) != g.dim()) throw InvalidArgument("snapshot: dim mismatch");
  for (int w = 0; w < 3; ++w) {
    if (s.header.sizes[w] != g.size(w)) throw InvalidArgument("snapshot: size mismatch");
    if (w < g.dim()) {
      const double tol = 1e-12 * std::max(1.0, std::abs(g.length(w)));
      if (std::abs(s.header.lower[w] - g.lower(w)) > tol ||
          std::abs(s.header.upper[w] - g.upper(w)) > tol)
        throw InvalidArgument("snapshot: domain bounds mismatch on axis " + std::to_string(w));
    }
  }
  ComplexBuffer data(s.values.begin(), s.values.end());
  return Field(grid, std::move(data));
}

}  // namespace gpsav
