#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <fftw3.h>

namespace popper::oracle::detail {

/// Owns an FFTW plan pair for one (rank, size).  Transforms run in place on any buffer
/// of the planned size; the inverse is unnormalized.
class FftPlan {
 public:
  FftPlan(std::size_t rows, std::size_t cols);  // rows == 1 selects a 1-D transform
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward(std::span<std::complex<double>> data) const;
  void inverse(std::span<std::complex<double>> data) const;
  std::size_t size() const { return rows_ * cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

/// Angular wave number of FFT bin j on n points with spacing dy.
double wave_number(std::size_t j, std::size_t n, double dy);

}  // namespace popper::oracle::detail
