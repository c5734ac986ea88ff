#pragma once

#include <cstddef>
#include <cstdint>

#include "mg/lattice.hpp"

namespace mg {

enum class NormConvention {
  // Norms are plain sums over Fourier coefficients; the (2 pi)^3 volume
  // factor is dropped.
  CoefficientSum,
};

/// Cube truncation |k_i| <= N with a physical oversampling factor used by
/// the padded transforms.
struct GridSpec {
  int N = 8;
  double pad = 1.5;
  NormConvention norm = NormConvention::CoefficientSum;

  GridSpec() = default;
  GridSpec(int radius, double oversampling = 1.5);

  int extent() const { return 2 * N + 1; }
  std::size_t size() const {
    const auto e = static_cast<std::size_t>(extent());
    return e * e * e;
  }
  bool contains(const FrequencyVector& k) const {
    return k.k1 >= -N && k.k1 <= N && k.k2 >= -N && k.k2 <= N && k.k3 >= -N && k.k3 <= N;
  }
  /// Lexicographic index, k1 outermost, each component running -N..N.
  std::size_t index(const FrequencyVector& k) const {
    const auto e = static_cast<std::int64_t>(extent());
    return static_cast<std::size_t>(((k.k1 + N) * e + (k.k2 + N)) * e + (k.k3 + N));
  }
  FrequencyVector wavevector(std::size_t idx) const {
    const auto e = static_cast<std::size_t>(extent());
    const auto i3 = static_cast<std::int64_t>(idx % e);
    const auto i2 = static_cast<std::int64_t>((idx / e) % e);
    const auto i1 = static_cast<std::int64_t>(idx / (e * e));
    return {i1 - N, i2 - N, i3 - N};
  }

  /// Points per direction of the physical grid: the smallest 2^a 3^b 5^c
  /// at or above pad*(2N+1).
  int transform_size() const;

  /// True when quadratic products on the transform grid are alias-free for
  /// the retained modes.
  bool dealiased() const { return transform_size() >= 3 * N + 1; }

  friend bool operator==(const GridSpec& a, const GridSpec& b) { return a.N == b.N && a.pad == b.pad; }
};

/// Smallest 2^a 3^b 5^c >= n.
int next_fast_size(int n);

}  // namespace mg
