#pragma once

// Per-record norms along a trajectory and the post-processing built on them:
// energy balance, decay fits, the bootstrap inequalities and the empirical
// constant of the H^s energy estimate.

#include <cmath>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mg/dynamics.hpp"
#include "mg/fields.hpp"

namespace mg {

struct DiagnosticsRecord {
  double t = 0;
  double l2 = 0;
  std::vector<std::pair<double, double>> hs;  // (s, ||theta||_{H^s})
  double sqrtM3_energy = 0;                   // ||sqrt(M3) theta||^2
  double dissipation = 0;                     // sum_k sigma(k) |theta_hat|^2
  double energy_residual = 0;
  double leakage = 0;                         // NaN when no line is designated
  double max_divergence = 0;
  double projected_mass = 0;

  /// Throws MissingOrders when s was not recorded.
  double hs_at(double s) const;
};

double sqrtM3_energy(const SpectralField& f);
double sqrtM3_energy(const LineField& f);
double dissipation_rate(const SpectralField& f, const ModelParams& params);
double dissipation_rate(const LineField& f, const ModelParams& params);

/// Dissipation D = sum sigma |theta_hat|^2 and its time derivative along the flow.
struct DissipationSample {
  double value = 0;
  double slope = 0;
};

/// Running form of |E(t) - E(0) + 2 int_0^t D| / E(0). The integral uses the
/// end-corrected trapezoidal rule, fourth order in dt given exact slopes.
class EnergyLedger {
 public:
  EnergyLedger(double energy0, DissipationSample first) : e0_(energy0), prev_(first) {}
  void advance(double dt, DissipationSample next) {
    integral_ += 0.5 * dt * (prev_.value + next.value) - dt * dt / 12.0 * (next.slope - prev_.slope);
    prev_ = next;
  }
  double residual(double energy) const {
    return e0_ > 0 ? std::abs(energy - e0_ + 2.0 * integral_) / e0_ : 0.0;
  }

 private:
  double e0_;
  DissipationSample prev_;
  double integral_ = 0;
};

/// Builds records for one run. Sobolev weights are tabulated once.
class RecordBuilder {
 public:
  RecordBuilder(const GridSpec& grid, const ModelParams& params, std::vector<double> orders,
                std::optional<LineSpec> designated_line);
  RecordBuilder(const LineSpec& line, int line_radius, const ModelParams& params, std::vector<double> orders);

  const std::vector<double>& orders() const { return orders_; }
  double dissipation(const SpectralField& f) const;
  double dissipation(const LineField& f) const;
  /// `rate` is the nonlinear term at f, so that d/dt theta_hat = -sigma theta_hat + rate.
  DissipationSample dissipation_sample(const SpectralField& f, const SpectralField& rate) const;
  DissipationSample dissipation_sample(const LineField& f, const LineField& rate) const;

  DiagnosticsRecord make(double t, const SpectralField& f, const NonlinearInfo& info, double residual) const;
  DiagnosticsRecord make(double t, const LineField& f, const NonlinearInfo& info, double residual) const;

 private:
  ModelParams params_;
  std::vector<double> orders_;
  std::optional<LineSpec> line_;
  std::vector<std::vector<double>> weights_;  // per order, per coefficient
  std::vector<double> sigma_;
  std::vector<double> m3_;
};

/// Post-hoc energy balance over a window of consecutive records.
double energy_law_residual(std::span<const DiagnosticsRecord> window);

struct DecayFit {
  double s = 0;
  double rate = 0;
  double r_squared = 0;
  double reference_rate = 0;
  double prefactor = 0;  // exp(intercept)
};

/// Fraction of leading records excluded from fits.
inline constexpr double kFitWarmupFraction = 0.05;

DecayFit decay_fit(std::span<const DiagnosticsRecord> records, double s, double reference_rate);

struct BootstrapReport {
  double epsilon = 0;
  double kappa = 0;
  double low_order = 0;            // 5/2 + delta
  bool low_order_ok = true;        // ||theta||_{H^{5/2+delta}} <= 2 eps e^{-m t}
  bool kappa_ok = true;            // ||theta||_{H^kappa} <= 2 eps
  double low_order_margin = 0;     // min over records of bound / value
  double kappa_margin = 0;
  std::optional<double> first_violation_time;
};

/// kappa = 1/alpha + 5/2 + delta; m_lower is the decay rate of the line.
BootstrapReport bootstrap_check(std::span<const DiagnosticsRecord> records, double epsilon, double alpha,
                                double delta, double m_lower);

struct EmpiricalConstant {
  double value = 0;
  std::optional<double> binding_time;
};

/// Smallest C >= 0 with
///   d/dt ||theta||^2_{H^s} <= -2 m_lo (1 - (C m_hi / m_lo) ||theta||_{H^{5/2+delta}}) ||theta||^2_{H^s}
/// at every interior record, the derivative taken by centred differences.
EmpiricalConstant empirical_Cs(std::span<const DiagnosticsRecord> records, double s, double delta, double m_lower,
                               double m_upper);

void write_diagnostics_csv(std::ostream& os, std::span<const double> orders,
                           std::span<const DiagnosticsRecord> records);

}  // namespace mg
