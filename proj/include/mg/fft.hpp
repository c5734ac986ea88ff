#pragma once

// Thin RAII wrappers over FFTW real transforms. Plans are built with
// FFTW_ESTIMATE so results do not depend on run-time planner timings.

#include <complex>
#include <cstddef>
#include <span>

namespace mg::fft {

/// Owning buffer allocated with fftw_malloc.
template <typename T>
class AlignedBuffer {
 public:
  AlignedBuffer() = default;
  explicit AlignedBuffer(std::size_t n);
  ~AlignedBuffer();
  AlignedBuffer(AlignedBuffer&& other) noexcept;
  AlignedBuffer& operator=(AlignedBuffer&& other) noexcept;
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;

  T* data() { return data_; }
  const T* data() const { return data_; }
  std::size_t size() const { return size_; }
  std::span<T> span() { return {data_, size_}; }
  std::span<const T> span() const { return {data_, size_}; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  void fill(const T& v);

 private:
  T* data_ = nullptr;
  std::size_t size_ = 0;
};

/// Real <-> half-complex transforms on an M^3 periodic grid.
/// Layout: real data row-major [x1][x2][x3]; spectral data
/// [k1 mod M][k2 mod M][0..M/2] (k3 >= 0 half).
/// backward: spectral -> real, unnormalized (sum of coefficients times
/// e^{+i k.x}); forward: real -> spectral, unnormalized (divide by M^3 for
/// coefficients).
class RealTransform3D {
 public:
  explicit RealTransform3D(int m);
  ~RealTransform3D();
  RealTransform3D(const RealTransform3D&) = delete;
  RealTransform3D& operator=(const RealTransform3D&) = delete;

  int size() const { return m_; }
  std::size_t real_size() const { return real_.size(); }
  std::size_t spectral_size() const { return spectral_.size(); }

  std::span<double> real() { return real_.span(); }
  std::span<std::complex<double>> spectral() { return spectral_.span(); }

  /// Destroys the contents of spectral().
  void backward();
  void forward();

 private:
  int m_;
  AlignedBuffer<double> real_;
  AlignedBuffer<std::complex<double>> spectral_;
  void* plan_backward_ = nullptr;
  void* plan_forward_ = nullptr;
};

/// One-dimensional analogue used by the line-reduced solver.
class RealTransform1D {
 public:
  explicit RealTransform1D(int m);
  ~RealTransform1D();
  RealTransform1D(const RealTransform1D&) = delete;
  RealTransform1D& operator=(const RealTransform1D&) = delete;

  int size() const { return m_; }
  std::span<double> real() { return real_.span(); }
  std::span<std::complex<double>> spectral() { return spectral_.span(); }
  void backward();
  void forward();

 private:
  int m_;
  AlignedBuffer<double> real_;
  AlignedBuffer<std::complex<double>> spectral_;
  void* plan_backward_ = nullptr;
  void* plan_forward_ = nullptr;
};

}  // namespace mg::fft
