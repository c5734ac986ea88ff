#pragma once

// Spectral representations of real, zero-vertical-mean scalars on the
// 3-torus: the full cube truncation and the reduction to a single frequency
// line. The physical field is theta(x) = sum_k theta_hat(k) e^{i k.x}.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "mg/grid.hpp"
#include "mg/lattice.hpp"

namespace mg {

using Complex = std::complex<double>;

class SpectralField {
 public:
  explicit SpectralField(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::vector<Complex>& data() { return coeffs_; }
  const std::vector<Complex>& data() const { return coeffs_; }

  Complex at(const FrequencyVector& k) const { return coeffs_[grid_.index(k)]; }
  Complex& at(const FrequencyVector& k) { return coeffs_[grid_.index(k)]; }

  /// Sets theta_hat(k) = value and theta_hat(-k) = conj(value).
  void set_pair(const FrequencyVector& k, Complex value);

  /// max_k |theta_hat(-k) - conj(theta_hat(k))|
  double hermitian_defect() const;
  /// max over k3 = 0 of |theta_hat(k)|
  double vertical_mean_defect() const;
  /// Zeroes k3 = 0 and symmetrizes to the Hermitian part. Returns the L2
  /// norm of what was removed from the k3 = 0 plane.
  double project();

  std::size_t support_size(double threshold = 0.0) const;
  bool is_finite() const;

 private:
  GridSpec grid_;
  std::vector<Complex> coeffs_;
};

/// Field supported on L(p): coefficient c_n represents theta_hat(n p).
class LineField {
 public:
  LineField(const LineSpec& line, int line_radius);

  const LineSpec& line() const { return line_; }
  int radius() const { return radius_; }
  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::vector<Complex>& data() { return coeffs_; }
  const std::vector<Complex>& data() const { return coeffs_; }

  Complex at(std::int64_t n) const { return coeffs_[static_cast<std::size_t>(n + radius_)]; }
  Complex& at(std::int64_t n) { return coeffs_[static_cast<std::size_t>(n + radius_)]; }
  void set_pair(std::int64_t n, Complex value);

  double hermitian_defect() const;
  bool is_finite() const;

 private:
  LineSpec line_;
  int radius_;
  std::vector<Complex> coeffs_;
};

enum class SobolevKind { Inhomogeneous, Homogeneous };

/// (sum_k w(k) |theta_hat(k)|^2)^{1/2} with w = (1+|k|^2)^s or |k|^{2s}.
double sobolev_norm(const SpectralField& f, double s, SobolevKind kind = SobolevKind::Inhomogeneous);
double sobolev_norm(const LineField& f, double s, SobolevKind kind = SobolevKind::Inhomogeneous);

/// Weight w(k) for a given |k|^2.
double sobolev_weight(double norm2, double s, SobolevKind kind);

SpectralField embed_line(const LineField& f, const GridSpec& grid);

struct LineRestriction {
  LineField field;
  double leakage = 0;  // sqrt(off-line energy / total energy), 0 for zero input
};

LineRestriction restrict_line(const SpectralField& f, const LineSpec& line);

/// Unit-modulus pseudo-random phases with |c_n| = |n|^{-beta}.
LineField random_line_data(const LineSpec& line, int line_radius, double beta, std::uint64_t seed);

/// Generic data: every mode with 0 < max|k_i| <= k_max and k3 != 0 gets a
/// random phase and amplitude |k|^{-beta}.
SpectralField random_field(const GridSpec& grid, int k_max, double beta, std::uint64_t seed);

/// Physical samples on the transform_size()^3 grid x_j = 2 pi j / M,
/// row-major [x1][x2][x3].
struct PhysicalField {
  int M = 0;
  std::vector<double> values;

  double at(int i1, int i2, int i3) const {
    return values[(static_cast<std::size_t>(i1) * M + i2) * M + i3];
  }
};

PhysicalField to_physical(const SpectralField& f);
/// Inverse of to_physical: transforms and truncates to the grid's cube.
SpectralField from_physical(const PhysicalField& p, const GridSpec& grid);

// --- MGSF snapshots --------------------------------------------------------

struct SnapshotMeta {
  double time = 0;
  std::optional<LineSpec> line;
  double eps_hyper = 0;
  double eps_kappa = 0;
  double gamma = 1;
  double omega_prime = 1;
};

inline constexpr std::uint16_t kSnapshotVersion = 1;

/// Writes `path` (binary) and `path` + ".json" (metadata sidecar).
void write_snapshot(const std::filesystem::path& path, const SpectralField& f, const SnapshotMeta& meta);
SpectralField read_snapshot(const std::filesystem::path& path, double pad = 1.5);

}  // namespace mg
