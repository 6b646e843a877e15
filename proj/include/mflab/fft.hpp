#pragma once

// Thin RAII wrapper around FFTW complex-to-complex transforms on a
// row-major tensor grid (rank = number of axes, every axis of length M).

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace mflab {

class Fft {
 public:
  Fft(int rank, int m) : rank_(rank), m_(m) {
    size_ = 1;
    for (int i = 0; i < rank; ++i) size_ *= std::size_t(m);
    buf_ = fftw_alloc_complex(size_);
    if (!buf_) throw std::bad_alloc();
    std::vector<int> dims(std::size_t(rank), m);
    fwd_ = fftw_plan_dft(rank, dims.data(), buf_, buf_, FFTW_FORWARD, FFTW_MEASURE);
    bwd_ = fftw_plan_dft(rank, dims.data(), buf_, buf_, FFTW_BACKWARD, FFTW_MEASURE);
    if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan failed");
  }

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  ~Fft() {
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
    if (buf_) fftw_free(buf_);
  }

  std::size_t size() const { return size_; }
  int rank() const { return rank_; }
  int m() const { return m_; }

  std::complex<double>* data() {
    return reinterpret_cast<std::complex<double>*>(buf_);
  }

  void forward() { fftw_execute(fwd_); }

  // inverse including the 1/size normalization
  void backward() {
    fftw_execute(bwd_);
    auto* p = data();
    const double s = 1.0 / double(size_);
    for (std::size_t i = 0; i < size_; ++i) p[i] *= s;
  }

 private:
  int rank_ = 0, m_ = 0;
  std::size_t size_ = 0;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

}  // namespace mflab
