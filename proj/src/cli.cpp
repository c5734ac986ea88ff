#include "mg/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

#include <fmt/format.h>

#include "mg/diagnostics.hpp"
#include "mg/dynamics.hpp"
#include "mg/symbols.hpp"
#include "mg/timestepping.hpp"

#ifndef MG_VERSION
#define MG_VERSION "dev"
#endif

namespace mg::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Tolerances of the always-on invariants.
constexpr double kDivergenceLimit = 1e-12;
constexpr double kLineProjectionLimit = 1e-12;
constexpr double kLineNonlinearLimit = 1e-12;
constexpr double kLeakageLimit = 1e-10;
constexpr double kMaxPrincipleSlack = 1e-12;

struct Check {
  std::string name;
  double value = 0;
  double limit = 0;
  bool passed = true;
  bool skipped = false;
};

class CheckList {
 public:
  void at_most(std::string name, double value, double limit) {
    checks_.push_back({std::move(name), value, limit, value <= limit, false});
  }
  void flag(std::string name, bool ok, double value = 0, double limit = 0) {
    checks_.push_back({std::move(name), value, limit, ok, false});
  }
  void skip(std::string name) { checks_.push_back({std::move(name), 0, 0, true, true}); }

  bool passed() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.passed; });
  }
  json to_json() const {
    json out = json::array();
    for (const auto& c : checks_) {
      out.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"passed", c.passed},
                     {"skipped", c.skipped}});
    }
    return out;
  }

 private:
  std::vector<Check> checks_;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string order_key(double s) { return fmt::format("{}", s); }

json hs_json(const DiagnosticsRecord& r) {
  json out = json::object();
  for (const auto& [s, v] : r.hs) out[order_key(s)] = v;
  return out;
}

json record_json(const DiagnosticsRecord& r) {
  return {{"t", r.t}, {"l2", r.l2}, {"hs", hs_json(r)}, {"sqrtM3_energy", r.sqrtM3_energy}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json line_json(const LineSpec& line) {
  json out;
  out["p"] = {line.p.k1, line.p.k2, line.p.k3};
  if (!line.degenerate()) {
    const auto lc = line_constants(line);
    out["m_lower"] = lc.m_lower;
    out["m_upper"] = lc.m_upper;
    out["components"] = lc.components;
  }
  return out;
}

json times_json(const TheoreticalTimes& t) {
  return {{"T_star_eps", t.T_star_eps}, {"T_local", t.T_local}, {"T_combined", t.T_combined},
          {"epsilon0", t.epsilon0},     {"m_lower", t.m_lower},  {"m_upper", t.m_upper}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

fs::path prepare_run_dir(const RunConfig& c, const fs::path& out_root) {
  const fs::path dir = out_root / c.name;
  fs::create_directories(dir / "snapshots");
  return dir;
}

void write_manifest(const fs::path& dir, const RunConfig& c, const std::string& command, const json& outputs,
                    double seconds) {
  json m;
  m["config_hash"] = c.hash();
  m["code_version"] = MG_VERSION;
  m["command"] = command;
  m["seed"] = c.seed;
  m["outputs"] = outputs;
  m["timings"] = {{"wall_seconds", seconds}};
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

// --- initial data ---------------------------------------------------------------------

const LineSpec& require_line(const RunConfig& c) {
  if (!c.line) throw Error(ErrorKind::Config, "this run needs line.q");
  return *c.line;
}

double resolve_order(const RunConfig& c, const std::string& text) {
  if (text == "kappa") return c.sim.constants.kappa();
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, "initial.norm_order must be a number or 'kappa'");
  }
}

double resolve_value(const RunConfig& c, const std::string& text) {
  if (text == "epsilon0") {
    return theoretical_times(0.0, 0.0, require_line(c), c.sim.constants, 0.0).epsilon0;
  }
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, "initial.norm_value must be a number or 'epsilon0'");
  }
}

template <typename Field>
void normalize(Field& f, const RunConfig& c) {
  const auto& init = c.initial;
  if (!init.norm_order && !init.norm_value) return;
  if (!init.norm_order || !init.norm_value) {
    throw Error(ErrorKind::Config, "initial.norm_order and initial.norm_value go together");
  }
  const double current = sobolev_norm(f, resolve_order(c, *init.norm_order));
  if (current == 0) return;
  const double factor = resolve_value(c, *init.norm_value) / current;
  for (Complex& v : f.coeffs()) v *= factor;
}

LineField build_line_data(const RunConfig& c, int radius) {
  const LineSpec& line = require_line(c);
  require_admissible(line);
  const auto& init = c.initial;
  LineField f(line, radius);
  if (init.kind == "random_line") {
    f = random_line_data(line, radius, init.beta, init.seed);
    for (Complex& v : f.coeffs()) v *= init.amplitude;
  } else if (init.kind == "line_pair") {
    f.set_pair(init.pair_mode, init.amplitude);
  } else if (init.kind != "zero") {
    throw Error(ErrorKind::Config, "initial.kind = " + init.kind + " is not line-supported");
  }
  normalize(f, c);
  return f;
}

bool line_supported_kind(const std::string& kind) { return kind == "random_line" || kind == "line_pair"; }

SpectralField curved_region_data(const RunConfig& c) {
  SpectralField f(c.grid);
  std::mt19937_64 gen(c.initial.seed);
  const int top = std::min(c.initial.k_max, c.grid.N);
  for (int k1 = 1; k1 <= top; ++k1) {
    const auto k2 = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(k1))));
    const double angle = 2.0 * M_PI * static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const double amp = c.initial.amplitude * std::pow(static_cast<double>(k1), -c.initial.beta);
    f.set_pair({k1, k2, 1}, amp * Complex(std::cos(angle), std::sin(angle)));
  }
  return f;
}

SpectralField build_full_data(const RunConfig& c) {
  const auto& init = c.initial;
  SpectralField f(c.grid);
  if (line_supported_kind(init.kind) || (init.kind == "zero" && c.line)) {
    const auto radius = std::min<std::int64_t>(c.line_radius, line_extent(require_line(c), c.grid.N));
    return embed_line(build_line_data(c, static_cast<int>(radius)), c.grid);
  }
  if (init.kind == "random_field") {
    f = random_field(c.grid, init.k_max, init.beta, init.seed);
    for (Complex& v : f.coeffs()) v *= init.amplitude;
  } else if (init.kind == "curved_region") {
    f = curved_region_data(c);
  } else if (init.kind == "snapshot") {
    f = read_snapshot(init.path, c.grid.pad);
    if (!(f.grid().N == c.grid.N)) throw Error(ErrorKind::Config, "snapshot truncation differs from grid.N");
  }
  normalize(f, c);
  return f;
}

std::vector<std::string> initial_warnings(const SpectralField& f) {
  double on_plane = 0;
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
    if (f.grid().wavevector(i).k2 == 0) on_plane += std::norm(f.coeffs()[i]);
  }
  if (on_plane == 0) return {};
  return {fmt::format("initial data carries energy {:.3e} on k2 = 0 modes, where M3 vanishes and no damping acts",
                      on_plane)};
}

std::vector<std::string> initial_warnings(const LineField& f) {
  if (f.line().p.k2 != 0 || sobolev_norm(f, 0) == 0) return {};
  return {"the line lies in k2 = 0, where M3 vanishes and no damping acts"};
}

std::vector<double> orders_for(const RunConfig& c) {
  std::vector<double> orders = c.sim.sobolev_orders;
  if (c.checks.bootstrap) {
    for (const double s : {2.5 + c.sim.constants.delta, c.sim.constants.kappa()}) {
      const bool present = std::any_of(orders.begin(), orders.end(), [&](double o) { return std::abs(o - s) < 1e-12; });
      if (!present) orders.push_back(s);
    }
  }
  return orders;
}

// --- trajectory bookkeeping ----------------------------------------------------------------

json write_trajectory(const fs::path& dir, const RunConfig& c, const Trajectory& traj) {
  std::ostringstream csv;
  write_diagnostics_csv(csv, traj.orders, traj.records);
  write_text(dir / "diagnostics.csv", csv.str());
  json outputs = {{"diagnostics", "diagnostics.csv"}, {"summary", "summary.json"}, {"snapshots", json::array()}};
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto& snap = traj.snapshots[i];
    const std::string name = fmt::format("snapshots/snap_{:04d}.mgsf", i);
    SnapshotMeta meta;
    meta.time = snap.t;
    meta.line = c.line;
    meta.eps_hyper = c.sim.model.eps_hyper;
    meta.eps_kappa = c.sim.model.eps_kappa;
    meta.gamma = c.sim.model.gamma;
    meta.omega_prime = c.sim.model.omega_prime;
    write_snapshot(dir / name, snap.field, meta);
    outputs["snapshots"].push_back(name);
  }
  return outputs;
}

double max_record(const Trajectory& traj, double DiagnosticsRecord::*field) {
  double worst = 0;
  for (const auto& r : traj.records) {
    if (std::isfinite(r.*field)) worst = std::max(worst, r.*field);
  }
  return worst;
}

void common_summary(json& s, const Trajectory& traj) {
  s["orders"] = traj.orders;
  s["records"] = traj.records.size();
  s["steps"] = traj.steps_taken;
  s["initial"] = traj.records.empty() ? json(nullptr) : record_json(traj.records.front());
  s["final"] = traj.records.empty() ? json(nullptr) : record_json(traj.records.back());
  s["blowup_time"] = optional_json(traj.blowup_time);
  s["max_energy_residual"] = max_record(traj, &DiagnosticsRecord::energy_residual);
  s["energy_law_residual"] =
      traj.records.size() >= 2 ? json(energy_law_residual(traj.records)) : json(nullptr);
  s["max_nonlinear_relative"] = traj.max_nonlinear_relative;
  s["max_energy_production"] = traj.max_energy_production;
  s["max_projected_mass"] = traj.max_projected_mass;
  s["max_divergence"] = max_record(traj, &DiagnosticsRecord::max_divergence);
  s["max_leakage"] = max_record(traj, &DiagnosticsRecord::leakage);
}

void optional_checks(CheckList& checks, const RunConfig& c, const Trajectory& traj) {
  if (c.checks.energy_residual_max) {
    checks.at_most("energy_residual", max_record(traj, &DiagnosticsRecord::energy_residual),
                   *c.checks.energy_residual_max);
  }
  if (c.checks.production_max) {
    checks.at_most("energy_production", traj.max_energy_production, *c.checks.production_max);
  }
  if (c.checks.nonlinear_max) {
    checks.at_most("nonlinear_relative", traj.max_nonlinear_relative, *c.checks.nonlinear_max);
  }
  if (c.checks.max_principle && !traj.records.empty()) {
    bool ok = true;
    double worst = 0;
    const auto& first = traj.records.front();
    for (const auto& r : traj.records) {
      for (std::size_t o = 0; o < r.hs.size(); ++o) {
        const double start = first.hs[o].second;
        const double excess = start > 0 ? r.hs[o].second / start - 1.0 : r.hs[o].second;
        worst = std::max(worst, excess);
        ok = ok && excess <= kMaxPrincipleSlack;
      }
    }
    checks.flag("max_principle", ok, worst, kMaxPrincipleSlack);
  }
}

void decay_section(json& s, CheckList& checks, const RunConfig& c, const Trajectory& traj, double reference) {
  s["decay_fits"] = json::array();
  if (traj.records.size() < 6) {
    if (c.checks.decay_tol) checks.skip("decay_rate");
    return;
  }
  for (const double order : traj.orders) {
    try {
      const DecayFit fit = decay_fit(traj.records, order, reference);
      s["decay_fits"].push_back({{"s", fit.s},
                                 {"rate", fit.rate},
                                 {"r_squared", fit.r_squared},
                                 {"reference_rate", fit.reference_rate},
                                 {"prefactor", fit.prefactor}});
      if (c.checks.decay_tol) {
        checks.at_most("decay_rate_s" + order_key(order), std::abs(fit.rate + reference), *c.checks.decay_tol);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateNorms) throw;
      if (c.checks.decay_tol) checks.skip("decay_rate_s" + order_key(order));
    }
  }
}

Outcome finish(const fs::path& dir, const RunConfig& c, const std::string& command, json summary,
               const CheckList& checks, const json& outputs, const Stopwatch& clock,
               const std::optional<double>& blowup) {
  summary["checks"] = checks.to_json();
  summary["passed"] = checks.passed() && !blowup;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  write_manifest(dir, c, command, outputs, clock.seconds());
  Outcome out;
  out.run_dir = dir;
  out.exit_code = blowup ? kBlowUp : (checks.passed() ? kPass : kInvariantViolation);
  out.summary = std::move(summary);
  return out;
}

json header(const RunConfig& c, const std::string& command) {
  json s;
  s["schema_version"] = 1;
  s["command"] = command;
  s["name"] = c.name;
  s["seed"] = c.seed;
  s["config_hash"] = c.hash();
  s["line"] = c.line ? line_json(*c.line) : json(nullptr);
  s["model"] = {{"eps_hyper", c.sim.model.eps_hyper},
                {"eps_kappa", c.sim.model.eps_kappa},
                {"gamma", c.sim.model.gamma},
                {"omega_prime", c.sim.model.omega_prime}};
  return s;
}

void check_kind(const RunConfig& c, const char* kind) {
  if (!c.kind.empty() && c.kind != kind) {
    throw Error(ErrorKind::Config, fmt::format("config is for '{}' runs, not '{}'", c.kind, kind));
  }
}

}  // namespace

// --- commands ------------------------------------------------------------------------------

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config:
    case ErrorKind::ZeroDirection:
    case ErrorKind::DegenerateLine:
    case ErrorKind::NonpositiveAperture:
    case ErrorKind::TruncationOverflow:
    case ErrorKind::PadTooSmall:
    case ErrorKind::InvalidArgument:
    case ErrorKind::MissingConstants:
    case ErrorKind::MissingOrders:
    case ErrorKind::InsufficientSweep:
      return kConfigError;
    case ErrorKind::NonFinite:
      return kBlowUp;
    case ErrorKind::NoConvergence:
      return kInvariantViolation;
    default:
      return kCrash;
  }
}

fs::path default_out_root() {
  if (const char* env = std::getenv("MG_SPECTRAL_OUT"); env != nullptr && *env != '\0') return env;
  return "runs";
}

Outcome line_run(const RunConfig& c, const fs::path& out_root) {
  const Stopwatch clock;
  check_kind(c, "line");
  const LineField theta0 = build_line_data(c, c.line_radius);
  SimConfig sim = c.sim;
  sim.sobolev_orders = orders_for(c);
  sim.designated_line = c.line;
  const Trajectory traj = integrate(theta0, sim);

  const fs::path dir = prepare_run_dir(c, out_root);
  const json outputs = write_trajectory(dir, c, traj);
  json s = header(c, "line-run");
  s["line_radius"] = c.line_radius;
  s["warnings"] = initial_warnings(theta0);
  common_summary(s, traj);

  const LineConstants lc = line_constants(*c.line);
  const double reference = c.sim.model.omega_prime * lc.m_lower;
  CheckList checks;
  checks.at_most("max_divergence", max_record(traj, &DiagnosticsRecord::max_divergence), kDivergenceLimit);
  checks.at_most("projected_mass", traj.max_projected_mass, kLineProjectionLimit);
  checks.at_most("line_nonlinear_relative", traj.max_nonlinear_relative,
                 c.checks.nonlinear_max.value_or(kLineNonlinearLimit));
  decay_section(s, checks, c, traj, reference);
  RunConfig rest = c;
  rest.checks.nonlinear_max.reset();
  optional_checks(checks, rest, traj);

  const AnalysisConstants& k = c.sim.constants;
  const double low = 2.5 + k.delta;
  const bool has_low =
      std::any_of(traj.orders.begin(), traj.orders.end(), [&](double o) { return std::abs(o - low) < 1e-12; });
  s["empirical_constants"] = json::object();
  if (has_low && traj.records.size() >= 3) {
    for (const double order : traj.orders) {
      const auto ec = empirical_Cs(traj.records, order, k.delta, reference, lc.m_upper);
      s["empirical_constants"]["C_s_" + order_key(order)] = {{"value", ec.value},
                                                            {"binding_time", optional_json(ec.binding_time)}};
    }
  }

  const double lambda = sobolev_norm(theta0, low, SobolevKind::Homogeneous);
  double drift = 0;
  for (const double m : lc.components) drift += m * m;
  drift = std::sqrt(drift) * sobolev_norm(theta0, low);
  try {
    s["theoretical_times"] = times_json(theoretical_times(lambda, drift, *c.line, k, c.sim.model.eps_hyper));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::MissingConstants) throw;
    s["theoretical_times"] = nullptr;
  }

  s["bootstrap"] = nullptr;
  if (c.checks.bootstrap) {
    const double eps = sobolev_norm(theta0, k.kappa());
    const auto report = bootstrap_check(traj.records, eps, k.alpha, k.delta, reference);
    s["bootstrap"] = {{"epsilon", report.epsilon},
                      {"kappa", report.kappa},
                      {"low_order", report.low_order},
                      {"low_order_ok", report.low_order_ok},
                      {"kappa_ok", report.kappa_ok},
                      {"low_order_margin", report.low_order_margin},
                      {"kappa_margin", report.kappa_margin},
                      {"first_violation_time", optional_json(report.first_violation_time)}};
    checks.flag("bootstrap_low_order", report.low_order_ok, report.low_order_margin, 1.0);
    checks.flag("bootstrap_kappa", report.kappa_ok, report.kappa_margin, 1.0);
  }
  return finish(dir, c, "line-run", std::move(s), checks, outputs, clock, traj.blowup_time);
}

Outcome full_run(const RunConfig& c, const fs::path& out_root) {
  const Stopwatch clock;
  check_kind(c, "full");
  const SpectralField theta0 = build_full_data(c);
  SimConfig sim = c.sim;
  sim.sobolev_orders = orders_for(c);
  const bool line_data = line_supported_kind(c.initial.kind) && c.line.has_value();
  sim.designated_line = c.line;
  const Trajectory traj = integrate(theta0, sim);

  const fs::path dir = prepare_run_dir(c, out_root);
  const json outputs = write_trajectory(dir, c, traj);
  json s = header(c, "full-run");
  s["grid"] = {{"N", c.grid.N}, {"pad", c.grid.pad}, {"transform_size", c.grid.transform_size()}};
  s["warnings"] = initial_warnings(theta0);
  common_summary(s, traj);

  CheckList checks;
  checks.at_most("max_divergence", max_record(traj, &DiagnosticsRecord::max_divergence), kDivergenceLimit);
  if (line_data) {
    checks.at_most("leakage", max_record(traj, &DiagnosticsRecord::leakage),
                   c.checks.leakage_max.value_or(kLeakageLimit));
    checks.at_most("projected_mass", traj.max_projected_mass, kLineProjectionLimit);
  } else if (c.checks.leakage_max) {
    checks.at_most("leakage", max_record(traj, &DiagnosticsRecord::leakage), *c.checks.leakage_max);
  }
  optional_checks(checks, c, traj);
  if (c.line && !c.line->degenerate()) {
    decay_section(s, checks, c, traj, c.sim.model.omega_prime * line_constants(*c.line).m_lower);
  } else if (c.checks.decay_tol) {
    checks.skip("decay_rate");
  }

  if (c.initial.kind == "curved_region") {
    json region = json::array();
    std::vector<double> x, y;
    const int top = std::min(c.initial.k_max, c.grid.N);
    for (int k1 = 1; k1 <= top; ++k1) {
      const FrequencyVector k{k1, static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(k1)))), 1};
      const auto m = eval_M(k);
      const double ratio = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
      region.push_back({{"k", {k.k1, k.k2, k.k3}}, {"velocity_ratio", ratio}, {"M2", m[1]}});
      // The floor in k2 makes small k1 pre-asymptotic; fit the top two octaves.
      if (4 * k1 < top) continue;
      x.push_back(std::log(static_cast<double>(k1)));
      y.push_back(std::log(std::abs(m[1])));
    }
    double slope = 0;
    if (x.size() >= 2) {
      const double n = static_cast<double>(x.size());
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
      }
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
      }
      slope = sxx > 0 ? sxy / sxx : 0;
    }
    const double theta_norm = sobolev_norm(theta0, 0);
    const double u_norm = vector_sobolev_norm(velocity(theta0), 0);
    s["curved_region"] = {{"modes", region},
                          {"M2_slope", slope},
                          {"velocity_over_theta", theta_norm > 0 ? json(u_norm / theta_norm) : json(nullptr)}};
  }
  return finish(dir, c, "full-run", std::move(s), checks, outputs, clock, traj.blowup_time);
}

Outcome picard_run(const RunConfig& c, const fs::path& out_root) {
  const Stopwatch clock;
  check_kind(c, "picard");
  const PicardSpec& p = c.picard;
  const SpectralField theta0 = build_full_data(c);
  const AnalysisConstants& k = c.sim.constants;

  PicardConfig pc;
  pc.n_max = p.n_max;
  pc.s = p.s;
  json s = header(c, "picard");
  s["grid"] = {{"N", c.grid.N}, {"pad", c.grid.pad}, {"transform_size", c.grid.transform_size()}};
  s["source"] = p.source;

  double base_horizon = 0;
  if (p.source == "frozen") {
    if (!(p.eps > 0)) throw Error(ErrorKind::Config, "picard.eps must be > 0 for the frozen-drift scheme");
    if (!k.C_s) throw Error(ErrorKind::MissingConstants, "analysis.C_s is required");
    SpectralField source = random_field(c.grid, p.drift_k_max, p.drift_beta, p.drift_seed);
    for (Complex& v : source.coeffs()) v *= p.drift_amplitude;
    pc.drift = velocity(source);
    pc.eps = p.eps;
    const double drift_norm = vector_sobolev_norm(*pc.drift, p.s);
    s["drift_hs_norm"] = drift_norm;
    s["drift_max_divergence"] = max_divergence(*pc.drift);
    base_horizon = hyperdissipative_horizon(p.eps, *k.C_s, drift_norm);
    s["T_star_eps"] = base_horizon;
  } else {
    pc.eps = 0;
    const double lambda = sobolev_norm(theta0, p.s, SobolevKind::Homogeneous);
    const auto times = theoretical_times(lambda, 0.0, require_line(c), k, 0.0);
    s["theoretical_times"] = times_json(times);
    base_horizon = times.T_combined;
  }
  if (p.horizon == "t_star_eps" || p.horizon == "t_combined") {
    pc.horizon = base_horizon * p.horizon_factor;
  } else {
    try {
      pc.horizon = std::stod(p.horizon) * p.horizon_factor;
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "picard.horizon must be t_star_eps, t_combined or a number");
    }
  }
  if (!std::isfinite(pc.horizon) || !(pc.horizon > 0)) {
    throw Error(ErrorKind::Config, fmt::format("Picard horizon {} is not a positive finite time", pc.horizon));
  }
  pc.dt = pc.horizon / static_cast<double>(p.steps);

  const PicardResult result = picard_solve(theta0, pc);
  const fs::path dir = prepare_run_dir(c, out_root);

  std::string csv = "n,difference,ratio\n";
  for (std::size_t i = 0; i < result.differences.size(); ++i) {
    const bool undefined = i == 0 || result.status == PicardStatus::ExactFixedPoint;
    const double ratio = undefined ? std::nan("") : result.ratios[i - 1];
    csv += fmt::format("{},{:.17g},{:.17g}\n", i + 1, result.differences[i], ratio);
  }
  write_text(dir / "picard.csv", csv);

  s["horizon"] = pc.horizon;
  s["dt"] = result.dt;
  s["steps"] = result.steps;
  s["norm_order"] = result.norm_order;
  s["differences"] = result.differences;
  // With identically zero differences the ratios are 0/0.
  const bool fixed_point = result.status == PicardStatus::ExactFixedPoint;
  s["ratios"] = fixed_point ? json(std::vector<std::nullptr_t>(result.ratios.size(), nullptr)) : json(result.ratios);
  s["status"] = to_string(result.status);
  s["exact_fixed_point"] = fixed_point;

  CheckList checks;
  if (c.checks.picard_ratio_max) {
    const double worst =
        result.ratios.empty() ? 0.0 : *std::max_element(result.ratios.begin(), result.ratios.end());
    checks.at_most("picard_ratio", worst, *c.checks.picard_ratio_max);
    checks.flag("picard_convergence", result.status != PicardStatus::NoConvergence);
  }
  const json outputs = {{"picard", "picard.csv"}, {"summary", "summary.json"}};
  return finish(dir, c, "picard", std::move(s), checks, outputs, clock, std::nullopt);
}

int symbols_command(const SymbolsOptions& o, const fs::path& out_dir, std::ostream& os) {
  json result = json::object();
  const bool table = o.N.has_value() || (!o.probe && !o.line && !o.cone);
  if (table || o.probe) fs::create_directories(out_dir);

  if (table) {
    const int n = o.N.value_or(8);
    if (n < 1 || n > 64) throw Error(ErrorKind::Config, "symbol table radius must lie in 1..64");
    std::string csv = "k1,k2,k3,M1,M2,M3,sqrtM3\n";
    for (int k1 = -n; k1 <= n; ++k1) {
      for (int k2 = -n; k2 <= n; ++k2) {
        for (int k3 = -n; k3 <= n; ++k3) {
          const FrequencyVector k{k1, k2, k3};
          const auto m = eval_M(k);
          csv += fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", k1, k2, k3, m[0], m[1], m[2],
                             eval_sqrtM3(k));
        }
      }
    }
    write_text(out_dir / "symbols.csv", csv);
    result["table"] = {{"path", (out_dir / "symbols.csv").string()}, {"N", n}};
  }

  if (o.probe) {
    std::string text = *o.probe;
    if (text.rfind("r=", 0) == 0) text = text.substr(2);
    double r = 0;
    std::int64_t lo = 0, hi = 0;
    try {
      r = std::stod(text);
      const auto colon = o.k1_range.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("range");
      lo = std::stoll(o.k1_range.substr(0, colon));
      hi = std::stoll(o.k1_range.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "probe needs --probe r=<value> and --k1 lo:hi");
    }
    const auto sweep = geometric_sweep(lo, hi, o.points);
    const auto probe = asymptotic_probe(r, sweep);
    json pj = {{"r", probe.r}, {"k1", probe.k1}, {"slopes", probe.slopes}};
    write_text(out_dir / "probe.json", pj.dump(2) + "\n");
    result["probe"] = pj;
  }

  if (o.line) {
    const LineSpec line = canonicalize_line(parse_rational_triple(*o.line));
    json lj = {{"p", {line.p.k1, line.p.k2, line.p.k3}}, {"admissible", !line.degenerate()}};
    const auto m = eval_M(line.p);
    lj["components"] = m;
    if (!line.degenerate()) {
      const auto lc = line_constants(line);
      lj["m_lower"] = lc.m_lower;
      lj["m_upper"] = lc.m_upper;
    }
    result["line"] = lj;
  }

  if (o.cone) {
    const ConeSpec cone(parse_rational(*o.cone));
    const auto b = cone_bounds(cone);
    result["cone"] = {{"C", to_string(cone.aperture())}, {"m_lower", b.m_lower}, {"m_upper", b.m_upper}};
  }
  os << result.dump(2) << "\n";
  return kPass;
}

int report_command(const fs::path& run_dir, std::ostream& os) {
  std::ifstream in(run_dir / "summary.json");
  if (!in) throw Error(ErrorKind::Config, "no summary.json in " + run_dir.string());
  json s;
  try {
    s = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("unreadable summary: ") + e.what());
  }
  os << fmt::format("run      {} ({})\n", s.value("name", "?"), s.value("command", "?"));
  if (s.contains("decay_fits")) {
    for (const auto& f : s["decay_fits"]) {
      os << fmt::format("decay    s={:<6} rate={:+.6f} ref={:.6f} r2={:.6f}\n", f["s"].get<double>(),
                        f["rate"].get<double>(), f["reference_rate"].get<double>(), f["r_squared"].get<double>());
    }
  }
  if (s.contains("ratios")) {
    for (std::size_t i = 0; i < s["ratios"].size(); ++i) {
      const auto& r = s["ratios"][i];
      os << fmt::format("ratio    n={} {}\n", i + 2, r.is_number() ? fmt::format("{:.6g}", r.get<double>()) : "undefined");
    }
    os << fmt::format("status   {}\n", s.value("status", "?"));
  }
  for (const auto& ch : s.value("checks", json::array())) {
    const char* verdict = ch["skipped"].get<bool>() ? "SKIP" : (ch["passed"].get<bool>() ? "ok" : "FAIL");
    os << fmt::format("check    {:<28} {:>12.4e} <= {:<10.3e} {}\n", ch["name"].get<std::string>(),
                      ch["value"].is_number() ? ch["value"].get<double>() : std::nan(""),
                      ch["limit"].is_number() ? ch["limit"].get<double>() : std::nan(""), verdict);
  }
  const bool passed = s.value("passed", false);
  os << (passed ? "PASSED\n" : "FAILED\n");
  return passed ? kPass : kInvariantViolation;
}

}  // namespace mg::cli
