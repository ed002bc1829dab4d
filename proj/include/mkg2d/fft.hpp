#pragma once

// Thin thread-safe layer over FFTW. Plans are created once per shape and
// shared; every call executes on caller-owned memory.

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <vector>

namespace mkg2d::fft {

enum class Direction { forward, backward };

namespace detail {

struct PlanKey {
  std::vector<int> dims;
  Direction dir;
  bool operator<(const PlanKey& o) const {
    if (dims != o.dims) return dims < o.dims;
    return dir < o.dir;
  }
};

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const std::vector<int>& dims, Direction dir) {
    std::lock_guard lock(mutex_);
    PlanKey key{dims, dir};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    std::vector<std::complex<double>> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    // In-place, unaligned: callers execute on arbitrary std::vector storage.
    fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(std::move(key), plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

}  // namespace detail

/// Unnormalized in-place DFT of a row-major array with the given extents.
/// forward: X_k = sum_j x_j e^{-2 pi i jk/n}; backward uses e^{+...}.
inline void transform(std::span<std::complex<double>> data, const std::vector<int>& dims,
                      Direction dir) {
  fftw_plan plan = detail::PlanCache::instance().get(dims, dir);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

inline void transform_2d(std::span<std::complex<double>> data, int n0, int n1, Direction dir) {
  transform(data, {n0, n1}, dir);
}

inline void transform_3d(std::span<std::complex<double>> data, int n0, int n1, int n2,
                         Direction dir) {
  transform(data, {n0, n1, n2}, dir);
}

}  // namespace mkg2d::fft
