#pragma once

// Reference computations that share no code path with the library: a direct
// linear solve for the constitutive symbols and an O(n^2) convolution for
// the advection term.

#include <array>
#include <filesystem>
#include <string>

#include "mg/dynamics.hpp"
#include "mg/lattice.hpp"

namespace mg::oracle {

/// Exact velocity symbol for unit buoyancy at wavevector k, as U_j = num[j] / den.
struct BalanceSolution {
  std::array<__int128, 3> num{};
  __int128 den = 1;
};

/// Solves the rotating magnetostatic balance
///   U x e3 = -i k P - (k2^2 / |k|^2) U + e3,   k . U = 0
/// (the magnetic field already eliminated through |k|^2 b = i k2 U) by
/// fraction-free elimination in 128-bit integers. Requires k3 != 0.
BalanceSolution solve_balance(const FrequencyVector& k);

/// True when num / den equals the rational r exactly.
bool equals(__int128 num, __int128 den, const Rational& r);

/// -P[u . grad theta] by summing over all pairs p + q = k, where P zeroes the
/// k3 = 0 plane. With `drift` null the drift is M[theta].
SpectralField direct_advection(const SpectralField& theta, const VectorField* drift = nullptr);

/// Relative L2 distance |a - b| / |b| over all coefficients.
double relative_distance(const SpectralField& a, const SpectralField& b);

/// Fresh, empty directory below `root` named after `tag`.
std::filesystem::path scratch_dir(const std::filesystem::path& root, const std::string& tag);

/// Whole-file contents, binary.
std::string slurp(const std::filesystem::path& path);

}  // namespace mg::oracle
