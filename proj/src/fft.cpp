#include "mg/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <new>
#include <utility>

namespace mg::fft {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

template <typename T>
AlignedBuffer<T>::AlignedBuffer(std::size_t n) : size_(n) {
  if (n == 0) return;
  data_ = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (data_ == nullptr) throw std::bad_alloc();
  std::fill_n(data_, n, T{});
}

template <typename T>
AlignedBuffer<T>::~AlignedBuffer() {
  if (data_ != nullptr) fftw_free(data_);
}

template <typename T>
AlignedBuffer<T>::AlignedBuffer(AlignedBuffer&& other) noexcept
    : data_(std::exchange(other.data_, nullptr)), size_(std::exchange(other.size_, 0)) {}

template <typename T>
AlignedBuffer<T>& AlignedBuffer<T>::operator=(AlignedBuffer&& other) noexcept {
  if (this != &other) {
    if (data_ != nullptr) fftw_free(data_);
    data_ = std::exchange(other.data_, nullptr);
    size_ = std::exchange(other.size_, 0);
  }
  return *this;
}

template <typename T>
void AlignedBuffer<T>::fill(const T& v) {
  std::fill_n(data_, size_, v);
}

template class AlignedBuffer<double>;
template class AlignedBuffer<std::complex<double>>;

RealTransform3D::RealTransform3D(int m)
    : m_(m),
      real_(static_cast<std::size_t>(m) * m * m),
      spectral_(static_cast<std::size_t>(m) * m * (m / 2 + 1)) {
  std::lock_guard lock(planner_mutex());
  auto* spec = reinterpret_cast<fftw_complex*>(spectral_.data());
  plan_backward_ = fftw_plan_dft_c2r_3d(m, m, m, spec, real_.data(), FFTW_ESTIMATE);
  plan_forward_ = fftw_plan_dft_r2c_3d(m, m, m, real_.data(), spec, FFTW_ESTIMATE);
}

RealTransform3D::~RealTransform3D() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
}

void RealTransform3D::backward() { fftw_execute(static_cast<fftw_plan>(plan_backward_)); }
void RealTransform3D::forward() { fftw_execute(static_cast<fftw_plan>(plan_forward_)); }

RealTransform1D::RealTransform1D(int m)
    : m_(m), real_(static_cast<std::size_t>(m)), spectral_(static_cast<std::size_t>(m / 2 + 1)) {
  std::lock_guard lock(planner_mutex());
  auto* spec = reinterpret_cast<fftw_complex*>(spectral_.data());
  plan_backward_ = fftw_plan_dft_c2r_1d(m, spec, real_.data(), FFTW_ESTIMATE);
  plan_forward_ = fftw_plan_dft_r2c_1d(m, real_.data(), spec, FFTW_ESTIMATE);
}

RealTransform1D::~RealTransform1D() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
}

void RealTransform1D::backward() { fftw_execute(static_cast<fftw_plan>(plan_backward_)); }
void RealTransform1D::forward() { fftw_execute(static_cast<fftw_plan>(plan_forward_)); }

}  // namespace mg::fft
