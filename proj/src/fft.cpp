#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace sgm::detail {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// Planning is not thread-safe in FFTW; execution with the new-array interface is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  PlanPair get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> r(n);
    std::vector<fftw_complex> c(n / 2 + 1);
    const int ni = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.forward = fftw_plan_dft_r2c_1d(ni, r.data(), c.data(), flags);
    p.backward = fftw_plan_dft_c2r_1d(ni, c.data(), r.data(), flags | FFTW_DESTROY_INPUT);
    plans_.emplace(n, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, PlanPair> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

std::vector<std::complex<double>> forward_fft(std::span<const double> samples) {
  const std::size_t n = samples.size();
  std::vector<double> in(samples.begin(), samples.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_execute_dft_r2c(cache().get(n).forward, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& c : out) c *= scale;
  return out;
}

std::vector<double> inverse_fft(std::span<const std::complex<double>> half, std::size_t n) {
  std::vector<std::complex<double>> in(half.begin(), half.end());
  std::vector<double> out(n);
  fftw_execute_dft_c2r(cache().get(n).backward, reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
  return out;
}

}  // namespace sgm::detail
