#include "mg/timestepping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "mg/error.hpp"
#include "mg/symbols.hpp"

namespace mg {

namespace {

std::vector<double> grid_sigma(const GridSpec& grid, const ModelParams& params) {
  const auto table = SymbolTable::shared(grid);
  std::vector<double> sigma(grid.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = linear_symbol(table->M3()[i], table->norm2()[i], params);
  return sigma;
}

std::vector<double> line_sigma(const LineSpec& line, int radius, const ModelParams& params) {
  const double m3 = line_constants(line).m_lower;
  const double p2 = static_cast<double>(line.p.norm2());
  std::vector<double> sigma(static_cast<std::size_t>(2 * radius + 1));
  for (int n = -radius; n <= radius; ++n) {
    sigma[static_cast<std::size_t>(n + radius)] =
        n == 0 ? 0.0 : linear_symbol(m3, static_cast<double>(n) * n * p2, params);
  }
  return sigma;
}

std::vector<double> decay_factors(std::span<const double> sigma, double dt) {
  std::vector<double> out(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) out[i] = std::exp(-sigma[i] * dt);
  return out;
}

template <typename Field>
void scale_by(Field& f, std::span<const double> factors) {
  auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= factors[i];
}

template <typename Field, typename Rate>
Field if_rk4_combine(const Field& theta, const Field& a, Rate&& rate, std::span<const double> full,
                     std::span<const double> half, double h) {
  const auto th = theta.coeffs();
  const std::size_t n = th.size();

  Field stage = theta;
  auto s = stage.coeffs();
  for (std::size_t i = 0; i < n; ++i) s[i] = half[i] * (th[i] + 0.5 * h * a.coeffs()[i]);
  const Field b = rate(stage);
  for (std::size_t i = 0; i < n; ++i) s[i] = half[i] * th[i] + 0.5 * h * b.coeffs()[i];
  const Field c = rate(stage);
  for (std::size_t i = 0; i < n; ++i) s[i] = full[i] * th[i] + h * half[i] * c.coeffs()[i];
  const Field d = rate(stage);

  Field out = theta;
  auto o = out.coeffs();
  for (std::size_t i = 0; i < n; ++i) {
    o[i] = full[i] * th[i] + (h / 6.0) * (full[i] * a.coeffs()[i] +
                                          2.0 * half[i] * (b.coeffs()[i] + c.coeffs()[i]) + d.coeffs()[i]);
  }
  return out;
}

int snapshot_radius(const LineField& f) {
  const FrequencyVector& p = f.line().p;
  const std::int64_t widest = std::max({std::abs(p.k1), std::abs(p.k2), std::abs(p.k3)});
  return static_cast<int>(std::max<std::int64_t>(2, widest * f.radius()));
}

SpectralField as_spectral(const SpectralField& f) { return f; }
SpectralField as_spectral(const LineField& f) { return embed_line(f, GridSpec(snapshot_radius(f))); }

double field_energy(std::span<const Complex> c) {
  double sum = 0;
  for (const Complex& v : c) sum += std::norm(v);
  return sum;
}

// Shared driver for both field types.
template <typename Field>
Trajectory run(const Field& theta0, const SimConfig& config, IfRk4Stepper<Field>& stepper,
               const RecordBuilder& builder) {
  Trajectory traj;
  traj.orders = config.sobolev_orders;
  const std::int64_t steps = config.steps();
  const double h = steps > 0 ? config.t_end / static_cast<double>(steps) : 0.0;

  Field theta = theta0;
  std::optional<EnergyLedger> ledger;
  std::int64_t record_count = 0;

  for (std::int64_t n = 0;; ++n) {
    const double t = static_cast<double>(n) * h;
    NonlinearInfo info;
    Field a = stepper.rate(theta, &info);
    const DissipationSample d = builder.dissipation_sample(theta, a);
    if (ledger) {
      ledger->advance(h, d);
    } else {
      ledger.emplace(field_energy(theta.coeffs()), d);
    }
    traj.max_nonlinear_relative = std::max(traj.max_nonlinear_relative, info.relative_norm());
    traj.max_projected_mass = std::max(traj.max_projected_mass, info.relative_projection());
    const double norm = std::sqrt(field_energy(theta.coeffs()));
    if (norm > 0 && info.product_scale > 0) {
      traj.max_energy_production =
          std::max(traj.max_energy_production, std::abs(info.energy_pairing) / (norm * info.product_scale));
    }

    const bool last = n == steps;
    if (n % config.record_every == 0 || last) {
      traj.records.push_back(builder.make(t, theta, info, ledger->residual(norm * norm)));
      const bool snap = record_count == 0 || last ||
                        (config.snapshot_every > 0 && record_count % config.snapshot_every == 0);
      if (snap) traj.snapshots.push_back({t, as_spectral(theta)});
      ++record_count;
    }
    if (last) break;

    if (config.scheme == Scheme::ExactLine) {
      theta = semigroup_apply(theta0, static_cast<double>(n + 1) * h, config.model);
    } else {
      theta = stepper.step(theta, a);
    }
    traj.steps_taken = n + 1;
    if (!theta.is_finite()) {
      traj.blowup_time = static_cast<double>(n + 1) * h;
      break;
    }
  }
  return traj;
}

}  // namespace

// --- semigroup and steppers ----------------------------------------------------------

SpectralField semigroup_apply(SpectralField f, double dt, const ModelParams& params) {
  if (dt < 0) throw Error(ErrorKind::InvalidArgument, "semigroup time must be >= 0");
  if (dt == 0) return f;
  scale_by(f, decay_factors(grid_sigma(f.grid(), params), dt));
  return f;
}

LineField semigroup_apply(LineField f, double dt, const ModelParams& params) {
  if (dt < 0) throw Error(ErrorKind::InvalidArgument, "semigroup time must be >= 0");
  if (dt == 0) return f;
  scale_by(f, decay_factors(line_sigma(f.line(), f.radius(), params), dt));
  return f;
}

IfRk4Stepper<SpectralField>::IfRk4Stepper(const GridSpec& grid, const ModelParams& params, double dt)
    : op_(grid), dt_(dt) {
  if (!(dt > 0)) throw Error(ErrorKind::InvalidArgument, "time step must be > 0");
  const auto sigma = grid_sigma(grid, params);
  full_ = decay_factors(sigma, dt);
  half_ = decay_factors(sigma, 0.5 * dt);
}

SpectralField IfRk4Stepper<SpectralField>::step(const SpectralField& theta, const SpectralField& first_stage) {
  return if_rk4_combine(theta, first_stage, [&](const SpectralField& f) { return op_.apply(f); }, full_, half_,
                        dt_);
}

IfRk4Stepper<LineField>::IfRk4Stepper(const LineSpec& line, int line_radius, const ModelParams& params, double dt)
    : op_(line, line_radius), dt_(dt) {
  if (!(dt > 0)) throw Error(ErrorKind::InvalidArgument, "time step must be > 0");
  const auto sigma = line_sigma(line, line_radius, params);
  full_ = decay_factors(sigma, dt);
  half_ = decay_factors(sigma, 0.5 * dt);
}

LineField IfRk4Stepper<LineField>::step(const LineField& theta, const LineField& first_stage) {
  return if_rk4_combine(theta, first_stage, [&](const LineField& f) { return op_.apply(f); }, full_, half_, dt_);
}

SpectralField step_if_rk4(const SpectralField& f, double dt, const ModelParams& params) {
  IfRk4Stepper<SpectralField> stepper(f.grid(), params, dt);
  return stepper.step(f);
}

LineField step_if_rk4(const LineField& f, double dt, const ModelParams& params) {
  IfRk4Stepper<LineField> stepper(f.line(), f.radius(), params, dt);
  return stepper.step(f);
}

// --- integrate -------------------------------------------------------------------------

void SimConfig::validate() const {
  model.validate();
  if (!(dt > 0)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
  if (!(t_end >= 0)) throw Error(ErrorKind::InvalidArgument, "t_end must be >= 0");
  if (record_every < 1) throw Error(ErrorKind::InvalidArgument, "record_every must be >= 1");
  if (snapshot_every < 0) throw Error(ErrorKind::InvalidArgument, "snapshot_every must be >= 0");
  if (!(constants.alpha > 0 && constants.alpha < 1)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  }
  for (const double s : sobolev_orders) {
    if (!(s >= 0)) throw Error(ErrorKind::InvalidArgument, "Sobolev orders must be >= 0");
  }
}

std::int64_t SimConfig::steps() const {
  if (t_end == 0) return 0;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(t_end / dt - 1e-9)));
}

void Trajectory::require_finite() const {
  if (blowup_time) {
    throw Error(ErrorKind::NonFinite, fmt::format("non-finite coefficients at t = {:.6g}", *blowup_time));
  }
}

Trajectory integrate(const SpectralField& theta0, const SimConfig& config) {
  config.validate();
  if (config.scheme == Scheme::Picard) {
    throw Error(ErrorKind::InvalidArgument, "the Picard scheme runs through picard_solve");
  }
  const double h = config.steps() > 0 ? config.t_end / static_cast<double>(config.steps()) : config.dt;
  IfRk4Stepper<SpectralField> stepper(theta0.grid(), config.model, h);
  RecordBuilder builder(theta0.grid(), config.model, config.sobolev_orders, config.designated_line);
  return run(theta0, config, stepper, builder);
}

Trajectory integrate(const LineField& theta0, const SimConfig& config) {
  config.validate();
  if (config.scheme == Scheme::Picard) {
    throw Error(ErrorKind::InvalidArgument, "the Picard scheme runs through picard_solve");
  }
  const double h = config.steps() > 0 ? config.t_end / static_cast<double>(config.steps()) : config.dt;
  IfRk4Stepper<LineField> stepper(theta0.line(), theta0.radius(), config.model, h);
  RecordBuilder builder(theta0.line(), theta0.radius(), config.model, config.sobolev_orders);
  return run(theta0, config, stepper, builder);
}

// --- Picard ------------------------------------------------------------------------------

const char* to_string(PicardStatus status) {
  switch (status) {
    case PicardStatus::Contracting: return "contracting";
    case PicardStatus::ExactFixedPoint: return "exact_fixed_point";
    case PicardStatus::NoConvergence: return "no_convergence";
    case PicardStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

void PicardResult::require_convergence() const {
  if (status == PicardStatus::NoConvergence) {
    throw Error(ErrorKind::NoConvergence,
                fmt::format("difference ratios exceeded 1 for {} consecutive iterations", kDivergenceRun));
  }
}

namespace {

using Path = std::vector<SpectralField>;

// R_n = sup_t ||Lambda^r d||^2 + int ||sqrt(M3) Lambda^r d||^2 + eps int ||Lambda^{r+1} d||^2
double difference_functional(const Path& next, const Path& prev, std::span<const double> w_r,
                             std::span<const double> w_r1, std::span<const double> m3, double eps, double h) {
  double sup = 0;
  double integral = 0;
  double prev_density = 0;
  for (std::size_t m = 0; m < next.size(); ++m) {
    const auto a = next[m].coeffs();
    const auto b = prev[m].coeffs();
    double norm = 0, damped = 0, smooth = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = std::norm(a[i] - b[i]);
      norm += w_r[i] * d;
      damped += m3[i] * w_r[i] * d;
      smooth += w_r1[i] * d;
    }
    sup = std::max(sup, norm);
    const double density = damped + eps * smooth;
    if (m > 0) integral += 0.5 * h * (prev_density + density);
    prev_density = density;
  }
  return sup + integral;
}

}  // namespace

PicardResult picard_solve(const SpectralField& theta0, const PicardConfig& config) {
  if (config.n_max < 2) throw Error(ErrorKind::InvalidArgument, "Picard iteration needs n_max >= 2");
  if (!(config.eps >= 0)) throw Error(ErrorKind::InvalidArgument, "eps must be >= 0");
  if (!(config.horizon > 0)) throw Error(ErrorKind::InvalidArgument, "Picard horizon must be > 0");
  if (config.drift && !(config.eps > 0)) {
    throw Error(ErrorKind::InvalidArgument, "the frozen-drift scheme needs eps > 0");
  }
  const GridSpec& grid = theta0.grid();
  const bool frozen = config.drift.has_value();

  PicardResult result;
  result.norm_order = frozen ? config.s : config.s - 1.0;
  if (result.norm_order < 0) throw Error(ErrorKind::InvalidArgument, "Picard norm order must be >= 0");
  const double dt_request = config.dt > 0 ? config.dt : config.horizon / 64.0;
  result.steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(config.horizon / dt_request - 1e-9)));
  const double h = config.horizon / static_cast<double>(result.steps);
  result.dt = h;

  ModelParams params;
  params.eps_hyper = config.eps;
  const auto sigma = grid_sigma(grid, params);
  const auto full = decay_factors(sigma, h);
  const auto half = decay_factors(sigma, 0.5 * h);

  const auto table = SymbolTable::shared(grid);
  std::vector<double> w_r(grid.size()), w_r1(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    w_r[i] = sobolev_weight(table->norm2()[i], result.norm_order, SobolevKind::Homogeneous);
    w_r1[i] = sobolev_weight(table->norm2()[i], result.norm_order + 1.0, SobolevKind::Homogeneous);
  }
  const double reference = std::pow(sobolev_norm(theta0, result.norm_order, SobolevKind::Homogeneous), 2);
  // Differences at this level are rounding noise, not dynamics.
  const double negligible = 1e-26 * reference * (1.0 + config.horizon);

  AdvectionOperator op(grid);
  const auto steps = static_cast<std::size_t>(result.steps);

  // First iterate: no advection.
  Path current;
  current.reserve(steps + 1);
  current.push_back(theta0);
  for (std::size_t m = 0; m < steps; ++m) {
    SpectralField next = current.back();
    scale_by(next, std::span<const double>(full));
    current.push_back(std::move(next));
  }
  result.finals.push_back(current.back());

  int above_one = 0;
  bool all_negligible = true;
  for (int n = 1; n <= config.n_max; ++n) {
    Path next;
    next.reserve(steps + 1);
    next.push_back(theta0);
    if (frozen) {
      // theta_{n+1}' = -sigma theta_{n+1} - P[v . grad theta_n], midpoint Duhamel.
      Path forcing;
      forcing.reserve(steps + 1);
      for (const auto& f : current) forcing.push_back(op.apply(*config.drift, f));
      for (std::size_t m = 0; m < steps; ++m) {
        SpectralField step = next.back();
        auto c = step.coeffs();
        const auto f0 = forcing[m].coeffs();
        const auto f1 = forcing[m + 1].coeffs();
        for (std::size_t i = 0; i < c.size(); ++i) {
          c[i] = full[i] * c[i] + h * half[i] * 0.5 * (f0[i] + f1[i]);
        }
        next.push_back(std::move(step));
      }
    } else {
      // theta_{n+1}' = -sigma theta_{n+1} - P[u_n . grad theta_{n+1}], u_n = M[theta_n];
      // explicit integrating-factor midpoint rule.
      for (std::size_t m = 0; m < steps; ++m) {
        const SpectralField& theta = next.back();
        const SpectralField k1 = op.apply(velocity(current[m]), theta);
        SpectralField mid_state = theta;
        auto ms = mid_state.coeffs();
        for (std::size_t i = 0; i < ms.size(); ++i) ms[i] = half[i] * (ms[i] + 0.5 * h * k1.coeffs()[i]);
        SpectralField mid_drift_source = current[m];
        auto md = mid_drift_source.coeffs();
        for (std::size_t i = 0; i < md.size(); ++i) md[i] = 0.5 * (md[i] + current[m + 1].coeffs()[i]);
        const SpectralField k2 = op.apply(velocity(mid_drift_source), mid_state);
        SpectralField step = theta;
        auto c = step.coeffs();
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = full[i] * c[i] + h * half[i] * k2.coeffs()[i];
        next.push_back(std::move(step));
      }
    }
    const double r = difference_functional(next, current, w_r, w_r1, table->M3(), config.eps, h);
    result.differences.push_back(r);
    result.finals.push_back(next.back());
    current = std::move(next);

    const bool tiny = !(r > negligible);
    all_negligible = all_negligible && tiny;
    if (n >= 2) {
      const double before = result.differences[static_cast<std::size_t>(n - 2)];
      const double ratio = (tiny || !(before > negligible)) ? 0.0 : r / before;
      result.ratios.push_back(ratio);
      above_one = ratio > 1.0 ? above_one + 1 : 0;
      if (above_one >= kDivergenceRun) {
        result.status = PicardStatus::NoConvergence;
        return result;
      }
    }
  }
  if (all_negligible) {
    result.status = PicardStatus::ExactFixedPoint;
  } else if (std::all_of(result.ratios.begin(), result.ratios.end(), [](double q) { return q < 1.0; })) {
    result.status = PicardStatus::Contracting;
  } else {
    result.status = PicardStatus::Inconclusive;
  }
  return result;
}

// --- constants ------------------------------------------------------------------------------

double vector_sobolev_norm(const VectorField& v, double s) {
  double sum = 0;
  for (const auto& c : v) sum += std::pow(sobolev_norm(c, s), 2);
  return std::sqrt(sum);
}

double hyperdissipative_horizon(double eps, double C_s, double drift_hs_norm) {
  if (drift_hs_norm == 0) return std::numeric_limits<double>::infinity();
  return eps / (2.0 * C_s * drift_hs_norm * drift_hs_norm);
}

TheoreticalTimes theoretical_times(double lambda_s_theta0, double drift_hs_norm, const LineSpec& line,
                                   const AnalysisConstants& constants, double eps) {
  if (!constants.C_s || !constants.C_alpha || !constants.C_kappa) {
    throw Error(ErrorKind::MissingConstants, "C_s, C_alpha and C_kappa must all be supplied");
  }
  const LineConstants lc = line_constants(line);
  TheoreticalTimes out;
  out.m_lower = lc.m_lower;
  out.m_upper = lc.m_upper;
  const double growth = std::pow(*constants.C_s * lc.m_upper / std::sqrt(lc.m_lower) * lambda_s_theta0, 2);
  const double inf = std::numeric_limits<double>::infinity();
  out.T_local = growth > 0 ? std::numbers::ln2 / growth : inf;
  out.T_combined = growth > 0 ? std::min(std::numbers::ln2, 1.0 / 6.0) / growth : inf;
  out.T_star_eps = hyperdissipative_horizon(eps, *constants.C_s, drift_hs_norm);
  const double alpha = constants.alpha;
  out.epsilon0 = std::min((1.0 - alpha) / (16.0 * *constants.C_alpha), std::log(std::sqrt(2.0)) / *constants.C_kappa) *
                 (lc.m_lower / lc.m_upper);
  return out;
}

}  // namespace mg
