#pragma once

// Constitutive operators of the perturbed MG system and its advection term.
//
//   d_t theta + u . grad theta = -Omega' u_3 + (regularization),   u = M[theta]
//
// The damping -Omega' u_3 = -Omega' M3[theta] is linear and lives in
// linear_symbol(); nonlinear_term() is only the transport part.

#include <array>
#include <memory>
#include <vector>

#include "mg/fft.hpp"
#include "mg/fields.hpp"
#include "mg/symbols.hpp"

namespace mg {

struct ModelParams {
  double eps_hyper = 0;    // coefficient of -Laplacian
  double eps_kappa = 0;    // coefficient of (-Laplacian)^gamma
  double gamma = 1;
  double omega_prime = 1;  // slope of the background profile

  bool nondiffusive() const { return eps_hyper == 0 && eps_kappa == 0; }
  /// Throws InvalidArgument on negative coefficients or gamma outside (0, 1].
  void validate() const;
};

/// sigma(k) = Omega' M3(k) + eps |k|^2 + eps_kappa |k|^{2 gamma}
double linear_symbol(const FrequencyVector& k, const ModelParams& params);
double linear_symbol(double m3, double norm2, const ModelParams& params);

using VectorField = std::array<SpectralField, 3>;

VectorField velocity(const SpectralField& theta);
std::array<LineField, 3> velocity(const LineField& theta);
VectorField magnetic(const SpectralField& theta);

/// max_k |k . v_hat(k)| / max_{k,j} |v_hat_j(k)|, 0 for a zero field.
double max_divergence(const VectorField& v);

/// Side information from one evaluation of the advection term.
struct NonlinearInfo {
  double product_scale = 0;   // sum_j rms of u_j d_j theta on the padded grid
  double removed_norm = 0;    // L2 norm cut from the k3 = 0 plane
  double energy_pairing = 0;  // Re sum_k conj(theta_hat) N_hat
  double output_norm = 0;     // L2 norm of the returned term

  double relative_norm() const { return product_scale > 0 ? output_norm / product_scale : 0.0; }
  double relative_projection() const { return product_scale > 0 ? removed_norm / product_scale : 0.0; }
};

/// Evaluates -P[v . grad theta] pseudo-spectrally on the padded grid, where P
/// removes the k3 = 0 plane. Owns its transform workspace, so one instance
/// must not be shared between threads.
class AdvectionOperator {
 public:
  /// Throws PadTooSmall when the grid's transform cannot hold alias-free
  /// quadratic products.
  explicit AdvectionOperator(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  int transform_size() const { return fft_.size(); }

  /// Self-advection with u = M[theta].
  SpectralField apply(const SpectralField& theta, NonlinearInfo* info = nullptr);
  /// Advection of theta by a prescribed drift.
  SpectralField apply(const VectorField& drift, const SpectralField& theta, NonlinearInfo* info = nullptr);

 private:
  GridSpec grid_;
  std::shared_ptr<const SymbolTable> symbols_;
  fft::RealTransform3D fft_;
  std::vector<double> drift_;
  std::vector<double> product_;
};

/// Line-reduced counterpart: along L(p) the scalar is a function of the
/// single phase y = p . x, and each product u_j d_j theta becomes
/// M_j(p) p_j theta theta_y.
class LineAdvectionOperator {
 public:
  LineAdvectionOperator(const LineSpec& line, int line_radius);

  int transform_size() const { return fft_.size(); }
  LineField apply(const LineField& theta, NonlinearInfo* info = nullptr);

 private:
  LineSpec line_;
  int radius_;
  std::array<double, 3> m_;
  fft::RealTransform1D fft_;
  std::vector<double> theta_;
  std::vector<double> product_;
};

SpectralField nonlinear_term(const SpectralField& theta, NonlinearInfo* info = nullptr);
LineField nonlinear_term(const LineField& theta, NonlinearInfo* info = nullptr);

}  // namespace mg
