#pragma once

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <mutex>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace gpsav {

using Complex = std::complex<double>;

/// Allocator returning SIMD-aligned storage so every buffer can be fed to a
/// pre-built FFTW plan through the new-array execute interface.
template <typename T>
struct FftwAllocator {
  using value_type = T;

  FftwAllocator() noexcept = default;
  template <typename U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    void* p = fftw_malloc(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

  template <typename U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using ComplexBuffer = std::vector<Complex, FftwAllocator<Complex>>;

namespace detail {

// The FFTW planner is not re-entrant.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Thread count for FFTW, capped by GPSAV_THREADS (default 1).
inline int requested_threads() {
  const char* env = std::getenv("GPSAV_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  long n = std::strtol(env, &end, 10);
  if (end == env || n < 1) return 1;
  return static_cast<int>(std::min<long>(n, 256));
}

inline void init_fftw_threads_once() {
  static const bool done = [] {
    fftw_init_threads();
    return true;
  }();
  (void)done;
}

inline fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

/// Forward/inverse multidimensional DFT over a fixed x-fastest layout.
///
/// Forward is unnormalized (matches e^{-2 pi i jk/N}); inverse carries the
/// full 1/N factor. Plans are built with FFTW_ESTIMATE so the chosen
/// algorithm, and therefore the round-off pattern, is deterministic.
class Fft {
 public:
  /// `sizes` lists active axes in x, y, z order.
  explicit Fft(std::span<const std::size_t> sizes) {
    std::vector<int> dims(sizes.rbegin(), sizes.rend());  // FFTW is row-major
    total_ = 1;
    for (auto n : sizes) total_ *= n;
    ComplexBuffer scratch(total_);
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    detail::init_fftw_threads_once();
    fftw_plan_with_nthreads(detail::requested_threads());
    auto* buf = detail::as_fftw(scratch.data());
    forward_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf,
                             FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf,
                             FFTW_BACKWARD, FFTW_ESTIMATE);
    alignment_ = fftw_alignment_of(reinterpret_cast<double*>(scratch.data()));
  }

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  ~Fft() {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    if (forward_ != nullptr) fftw_destroy_plan(forward_);
    if (inverse_ != nullptr) fftw_destroy_plan(inverse_);
  }

  std::size_t size() const noexcept { return total_; }

  void forward(std::span<Complex> data) const { execute(forward_, data); }

  void inverse(std::span<Complex> data) const {
    execute(inverse_, data);
    const double scale = 1.0 / static_cast<double>(total_);
    for (auto& v : data) v *= scale;
  }

 private:
  void execute(fftw_plan plan, std::span<Complex> data) const {
    if (data.size() != total_) throw std::length_error("Fft: buffer length mismatch");
    auto* p = data.data();
    if (fftw_alignment_of(reinterpret_cast<double*>(p)) == alignment_) {
      fftw_execute_dft(plan, detail::as_fftw(p), detail::as_fftw(p));
      return;
    }
    ComplexBuffer tmp(data.begin(), data.end());
    fftw_execute_dft(plan, detail::as_fftw(tmp.data()), detail::as_fftw(tmp.data()));
    std::copy(tmp.begin(), tmp.end(), data.begin());
  }

  std::size_t total_ = 0;
  int alignment_ = 0;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace gpsav
