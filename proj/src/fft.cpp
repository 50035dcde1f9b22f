#include "cgl/fft.hpp"

#include <fftw3.h>

#include <array>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "cgl/error.hpp"

namespace cgl::detail {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int d, int n, FftDirection direction) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(d, n, direction);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::size_t total = 1;
    std::array<int, 4> dims{};
    for (int a = 0; a < d; ++a) {
      dims[a] = n;
      total *= static_cast<std::size_t>(n);
    }
    // FFTW_ESTIMATE never touches the buffer; it only fixes the in-place layout.
    auto* scratch = fftw_alloc_complex(total);
    const int sign = direction == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan = fftw_plan_dft(d, dims.data(), scratch, scratch, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) throw NumericalFailure("FFTW could not create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, FftDirection>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_inplace(std::span<std::complex<double>> data, int d, int n,
                 FftDirection direction) {
  fftw_plan plan = cache().get(d, n, direction);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace cgl::detail
