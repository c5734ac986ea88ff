#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mg/diagnostics.hpp"
#include "mg/dynamics.hpp"
#include "mg/fields.hpp"

namespace mg {

/// theta_hat(k) <- exp(-sigma(k) dt) theta_hat(k)
SpectralField semigroup_apply(SpectralField f, double dt, const ModelParams& params);
LineField semigroup_apply(LineField f, double dt, const ModelParams& params);

/// Integrating-factor RK4 for theta' = -sigma theta + N(theta). With
/// E = exp(-sigma h) and E2 = exp(-sigma h / 2):
///
///   a = N(theta)
///   b = N(E2 (theta + h/2 a))
///   c = N(E2 theta + h/2 b)
///   d = N(E theta + h E2 c)
///   theta' = E theta + h/6 (E a + 2 E2 (b + c) + d)
///
/// so N == 0 reproduces the semigroup exactly.
template <typename Field>
class IfRk4Stepper;

template <>
class IfRk4Stepper<SpectralField> {
 public:
  IfRk4Stepper(const GridSpec& grid, const ModelParams& params, double dt);

  double dt() const { return dt_; }
  /// First stage N(theta); exposed so callers can record its side info.
  SpectralField rate(const SpectralField& theta, NonlinearInfo* info = nullptr) { return op_.apply(theta, info); }
  SpectralField step(const SpectralField& theta, const SpectralField& first_stage);
  SpectralField step(const SpectralField& theta) { return step(theta, rate(theta)); }

 private:
  AdvectionOperator op_;
  double dt_;
  std::vector<double> full_, half_;
};

template <>
class IfRk4Stepper<LineField> {
 public:
  IfRk4Stepper(const LineSpec& line, int line_radius, const ModelParams& params, double dt);

  double dt() const { return dt_; }
  LineField rate(const LineField& theta, NonlinearInfo* info = nullptr) { return op_.apply(theta, info); }
  LineField step(const LineField& theta, const LineField& first_stage);
  LineField step(const LineField& theta) { return step(theta, rate(theta)); }

 private:
  LineAdvectionOperator op_;
  double dt_;
  std::vector<double> full_, half_;
};

SpectralField step_if_rk4(const SpectralField& f, double dt, const ModelParams& params);
LineField step_if_rk4(const LineField& f, double dt, const ModelParams& params);

enum class Scheme { ExactLine, IfRk4, Picard };

/// The generic constants of the analysis; unset means "not supplied".
struct AnalysisConstants {
  std::optional<double> C_s = 1.0;
  std::optional<double> C_alpha = 1.0;
  std::optional<double> C_kappa = 1.0;
  double alpha = 0.5;
  double delta = 0.01;  // H^{5/2+} is H^{2.5 + delta}

  double kappa() const { return 1.0 / alpha + 2.5 + delta; }
};

struct SimConfig {
  ModelParams model;
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::IfRk4;
  int record_every = 1;
  int snapshot_every = 0;  // in records; 0 keeps only the endpoints
  std::vector<double> sobolev_orders{0.0};
  std::optional<LineSpec> designated_line;  // enables leakage for 3-D runs
  AnalysisConstants constants;

  /// Throws InvalidArgument on dt <= 0, t_end < 0, record_every < 1.
  void validate() const;
  std::int64_t steps() const;
};

struct Snapshot {
  double t = 0;
  SpectralField field;
};

struct Trajectory {
  std::vector<double> orders;
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;
  double max_nonlinear_relative = 0;  // max over steps of ||N|| / product scale
  double max_energy_production = 0;   // max over steps of |<theta, N>| / (||theta|| product scale)
  double max_projected_mass = 0;
  std::int64_t steps_taken = 0;
  std::optional<double> blowup_time;

  /// Throws NonFinite (with the blow-up time) if the run diverged.
  void require_finite() const;
};

Trajectory integrate(const SpectralField& theta0, const SimConfig& config);
Trajectory integrate(const LineField& theta0, const SimConfig& config);

// --- Picard iteration --------------------------------------------------------------

struct PicardConfig {
  double eps = 0.1;       // hyperdissipation of the regularized scheme
  double horizon = 0.1;   // final time T of every iterate
  int n_max = 6;
  double dt = 0;          // 0 selects horizon / 64
  double s = 2.51;
  /// Present: frozen-drift scheme v . grad theta_n. Absent: self-consistent
  /// scheme with u_{n-1} = M[theta_{n-1}] advecting theta_n.
  std::optional<VectorField> drift;
};

enum class PicardStatus { Contracting, ExactFixedPoint, NoConvergence, Inconclusive };
const char* to_string(PicardStatus status);

struct PicardResult {
  std::vector<double> differences;  // R_n, n = 1..n_max
  std::vector<double> ratios;       // R_n / R_{n-1}, n = 2..n_max
  double norm_order = 0;            // s for the frozen scheme, s - 1 otherwise
  double dt = 0;
  std::int64_t steps = 0;
  PicardStatus status = PicardStatus::Inconclusive;
  std::vector<SpectralField> finals;  // theta_n(T), n = 1..n_max+1

  /// Throws NoConvergence for PicardStatus::NoConvergence.
  void require_convergence() const;
};

/// Ratios above 1 this many times in a row mean divergence.
inline constexpr int kDivergenceRun = 3;

PicardResult picard_solve(const SpectralField& theta0, const PicardConfig& config);

// --- explicit constants -------------------------------------------------------------

struct TheoreticalTimes {
  double T_star_eps = 0;
  double T_local = 0;
  double T_combined = 0;
  double epsilon0 = 0;
  double m_lower = 0;
  double m_upper = 0;
};

/// eps / (2 C_s ||v||^2_{H^s}); infinite for a zero drift.
double hyperdissipative_horizon(double eps, double C_s, double drift_hs_norm);
/// (sum_j ||v_j||^2_{H^s})^{1/2}
double vector_sobolev_norm(const VectorField& v, double s);

/// lambda_s_theta0 = ||Lambda^s theta_0||; drift_hs_norm = ||v||_{H^s}.
/// Throws MissingConstants when C_s, C_alpha or C_kappa is unset.
TheoreticalTimes theoretical_times(double lambda_s_theta0, double drift_hs_norm, const LineSpec& line,
                                   const AnalysisConstants& constants, double eps);

}  // namespace mg
