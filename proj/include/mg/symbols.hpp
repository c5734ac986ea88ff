#pragma once

// The anisotropic multipliers linking the scalar to its velocity and magnetic
// field, evaluated exactly (rationals) or in double precision.
//
//   M1(k) = (k2 k3 |k|^2 - k1 k2^2 k3) / D(k)
//   M2(k) = (-k1 k3 |k|^2 - k2^3 k3) / D(k)
//   M3(k) = k2^2 (k1^2 + k2^2) / D(k),        D(k) = k3^2 |k|^2 + k2^4
//
// All three vanish on k3 = 0.

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mg/grid.hpp"
#include "mg/lattice.hpp"

namespace mg {

using Complex = std::complex<double>;

std::array<Rational, 3> eval_M_exact(const FrequencyVector& k);
std::array<double, 3> eval_M(const FrequencyVector& k);
double eval_sqrtM3(const FrequencyVector& k);

/// The printed symbol (1/(i k3)) (k3^2 |k| + k2^4) / (|k|^4 + k2^4).
/// Inspection only; the dynamics consume M directly.
Complex eval_A(const FrequencyVector& k);

/// (i k2 / |k|^2) M_j(k): Fourier symbol of (-Laplacian)^{-1} d_2 M_j.
std::array<Complex, 3> eval_b_multiplier(const FrequencyVector& k);

struct LineConstants {
  double m_lower = 0;  // M3 on the line
  double m_upper = 0;  // max_j |M_j| on the line
  std::array<double, 3> components{};
};

/// M is even and homogeneous of degree zero, hence constant on L \ {0}.
LineConstants line_constants(const LineSpec& line);

struct ConeBounds {
  double m_lower = 0;
  double m_upper = 0;
};

/// Closed-form bounds over the cone |q1|,|q3| <= C|q2|:
///   upper = max{C + 2C^3 + C^2, C^2 + 2C^4 + C, 1 + C^2}
///   lower = 1 / (C^2 + 2C^4 + 1)
ConeBounds cone_bounds(const ConeSpec& cone);

struct ProbeResult {
  double r = 0;
  std::vector<std::int64_t> k1;
  std::array<double, 3> slopes{};
};

/// Sampled points (k1, round(k1^r), 1); least-squares slopes of log|M_j|
/// against log k1.
ProbeResult asymptotic_probe(double r, std::span<const std::int64_t> k1_sweep);

/// Geometric sweep from lo to hi (inclusive), rounded, duplicates removed.
std::vector<std::int64_t> geometric_sweep(std::int64_t lo, std::int64_t hi, int points);

/// Precomputed multiplier values over a cube truncation. Immutable once built.
class SymbolTable {
 public:
  explicit SymbolTable(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> M1() const { return m1_; }
  std::span<const double> M2() const { return m2_; }
  std::span<const double> M3() const { return m3_; }
  std::span<const double> sqrtM3() const { return sqrt_m3_; }
  std::span<const double> norm2() const { return norm2_; }

  static std::shared_ptr<const SymbolTable> shared(const GridSpec& grid);

 private:
  GridSpec grid_;
  std::vector<double> m1_, m2_, m3_, sqrt_m3_, norm2_;
};

}  // namespace mg
