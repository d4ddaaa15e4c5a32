#include "fft.hpp"

#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace popper::oracle::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

FftPlan::FftPlan(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  std::vector<std::complex<double>> scratch(rows * cols);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  if (rows == 1) {
    forward_ = fftw_plan_dft_1d(static_cast<int>(cols), as_fftw(scratch.data()), as_fftw(scratch.data()),
                                FFTW_FORWARD, flags);
    inverse_ = fftw_plan_dft_1d(static_cast<int>(cols), as_fftw(scratch.data()), as_fftw(scratch.data()),
                                FFTW_BACKWARD, flags);
  } else {
    forward_ = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), as_fftw(scratch.data()),
                                as_fftw(scratch.data()), FFTW_FORWARD, flags);
    inverse_ = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), as_fftw(scratch.data()),
                                as_fftw(scratch.data()), FFTW_BACKWARD, flags);
  }
  if (!forward_ || !inverse_) throw std::runtime_error("FFTW planning failed");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  if (forward_) fftw_destroy_plan(forward_);
  if (inverse_) fftw_destroy_plan(inverse_);
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
  if (data.size() != size()) throw std::logic_error("FFT buffer size mismatch");
  fftw_execute_dft(forward_, as_fftw(data.data()), as_fftw(data.data()));
}

void FftPlan::inverse(std::span<std::complex<double>> data) const {
  if (data.size() != size()) throw std::logic_error("FFT buffer size mismatch");
  fftw_execute_dft(inverse_, as_fftw(data.data()), as_fftw(data.data()));
}

double wave_number(std::size_t j, std::size_t n, double dy) {
  const double signed_j = (j < (n + 1) / 2) ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
  return 2.0 * std::numbers::pi * signed_j / (static_cast<double>(n) * dy);
}

}  // namespace popper::oracle::detail
