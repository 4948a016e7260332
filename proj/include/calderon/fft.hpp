#pragma once

// Thin FFTW wrapper: cached deterministic plans (FFTW_ESTIMATE), in-place
// 2-D complex transforms on caller buffers.  Plan creation is serialized;
// execution on distinct buffers is safe concurrently.

#include <fftw3.h>

#include <map>
#include <mutex>

#include "calderon/numerics.hpp"

namespace calderon {
namespace fft {

namespace detail {

struct PlanCache {
  std::mutex mtx;
  std::map<std::pair<int, int>, fftw_plan> plans;  // (N, sign)
  std::map<int, fftw_complex*> scratch;

  fftw_plan get(int N, int sign) {
    std::lock_guard<std::mutex> lock(mtx);
    const auto key = std::make_pair(N, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    fftw_complex*& buf = scratch[N];
    if (!buf) buf = fftw_alloc_complex(size_t(N) * N);
    fftw_plan p = fftw_plan_dft_2d(N, N, buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw convergence_error("fft: plan creation failed");
    plans[key] = p;
    return p;
  }
};

inline PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace detail

inline void forward(std::vector<cplx>& data, int N) {
  if (data.size() != size_t(N) * N) throw domain_error("fft::forward: size mismatch");
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(detail::cache().get(N, FFTW_FORWARD), ptr, ptr);
}

inline void inverse(std::vector<cplx>& data, int N) {
  if (data.size() != size_t(N) * N) throw domain_error("fft::inverse: size mismatch");
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(detail::cache().get(N, FFTW_BACKWARD), ptr, ptr);
  const double scale = 1.0 / (double(N) * N);
  for (auto& x : data) x *= scale;
}

}  // namespace fft
}  // namespace calderon
