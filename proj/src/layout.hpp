#pragma once

// Packing between the centred cube [-N..N]^3 and FFTW's half-complex layout
// on an M^3 grid ([k1 mod M][k2 mod M][0..M/2]).

#include <algorithm>
#include <complex>
#include <cstdint>
#include <cstddef>
#include <span>

#include "mg/grid.hpp"

namespace mg::detail {

inline std::size_t wrap(std::int64_t k, int m) {
  return static_cast<std::size_t>(k < 0 ? k + m : k);
}

/// Clears `out`, then writes the k3 >= 0 half of the retained cube, reading
/// cube entry i through coeff(i).
template <typename Fn>
void pack_half(const GridSpec& grid, int m, std::span<std::complex<double>> out, Fn&& coeff) {
  const int n = grid.N;
  const std::size_t half = static_cast<std::size_t>(m / 2 + 1);
  std::fill(out.begin(), out.end(), std::complex<double>{});
  for (int k1 = -n; k1 <= n; ++k1) {
    for (int k2 = -n; k2 <= n; ++k2) {
      const std::size_t row = (wrap(k1, m) * static_cast<std::size_t>(m) + wrap(k2, m)) * half;
      const std::size_t base = grid.index({k1, k2, 0});
      for (int k3 = 0; k3 <= n; ++k3) {
        out[row + static_cast<std::size_t>(k3)] = coeff(base + static_cast<std::size_t>(k3));
      }
    }
  }
}

/// Reads the retained cube back from a half-complex array, multiplying by
/// `scale`; k3 < 0 entries come from Hermitian symmetry.
template <typename Fn>
void unpack_half(const GridSpec& grid, int m, std::span<const std::complex<double>> in, double scale, Fn&& store) {
  const int n = grid.N;
  const std::size_t half = static_cast<std::size_t>(m / 2 + 1);
  for (int k1 = -n; k1 <= n; ++k1) {
    for (int k2 = -n; k2 <= n; ++k2) {
      const std::size_t row = (wrap(k1, m) * static_cast<std::size_t>(m) + wrap(k2, m)) * half;
      const std::size_t mirror = (wrap(-k1, m) * static_cast<std::size_t>(m) + wrap(-k2, m)) * half;
      const std::size_t base = grid.index({k1, k2, 0});
      for (int k3 = 0; k3 <= n; ++k3) {
        store(base + static_cast<std::size_t>(k3), scale * in[row + static_cast<std::size_t>(k3)]);
      }
      for (int k3 = 1; k3 <= n; ++k3) {
        store(base - static_cast<std::size_t>(k3), scale * std::conj(in[mirror + static_cast<std::size_t>(k3)]));
      }
    }
  }
}

}  // namespace mg::detail
