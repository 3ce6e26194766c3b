#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace lookupf::fft {

using Complex = std::complex<double>;

namespace detail {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

using AlignedBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

inline AlignedBuffer allocate(std::size_t n) {
  return AlignedBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

// FFTW planning is not thread-safe; execution with new-array functions is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan2d {
 public:
  Plan2d(int width, int height) : n_(static_cast<std::size_t>(width) * height) {
    auto in = allocate(n_);
    auto out = allocate(n_);
    std::lock_guard lock(planner_mutex());
    // FFTW_ESTIMATE keeps plan choice independent of timing, so output bits
    // do not vary between runs.
    forward_ = fftw_plan_dft_2d(height, width, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(height, width, in.get(), out.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Plan2d() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  Plan2d(const Plan2d&) = delete;
  Plan2d& operator=(const Plan2d&) = delete;

  void run(bool forward, fftw_complex* in, fftw_complex* out) const {
    fftw_execute_dft(forward ? forward_ : backward_, in, out);
  }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

inline const Plan2d& plan_for(int width, int height) {
  static std::mutex cache_mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<Plan2d>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[{width, height}];
  if (!slot) slot = std::make_unique<Plan2d>(width, height);
  return *slot;
}

inline std::vector<Complex> transform(const std::vector<Complex>& data, int width, int height,
                                      bool forward) {
  const auto& plan = plan_for(width, height);
  auto in = allocate(plan.size());
  auto out = allocate(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    in[i][0] = data[i].real();
    in[i][1] = data[i].imag();
  }
  plan.run(forward, in.get(), out.get());
  std::vector<Complex> result(plan.size());
  const double scale = forward ? 1.0 : 1.0 / static_cast<double>(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    result[i] = Complex(out[i][0] * scale, out[i][1] * scale);
  }
  return result;
}

}  // namespace detail

// Unnormalized forward 2-D DFT of a row-major width x height grid.
inline std::vector<Complex> forward(const std::vector<Complex>& data, int width, int height) {
  return detail::transform(data, width, height, true);
}

// Inverse 2-D DFT, scaled by 1/(width*height).
inline std::vector<Complex> inverse(const std::vector<Complex>& data, int width, int height) {
  return detail::transform(data, width, height, false);
}

// Frequency in cycles/sample of DFT bin k out of n, in [-0.5, 0.5).
inline double bin_frequency(int k, int n) {
  return static_cast<double>(k < (n + 1) / 2 ? k : k - n) / n;
}

}  // namespace lookupf::fft
