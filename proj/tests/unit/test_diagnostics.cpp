#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mg/diagnostics.hpp"
#include "mg/error.hpp"
#include "mg/timestepping.hpp"

using namespace mg;

namespace {

// Records of ||theta||_{H^s} = a_s e^{-rate t}.
std::vector<DiagnosticsRecord> exponential_records(double rate, int count, double dt) {
  std::vector<DiagnosticsRecord> out;
  for (int i = 0; i < count; ++i) {
    DiagnosticsRecord r;
    r.t = i * dt;
    r.l2 = std::exp(-rate * r.t);
    r.hs = {{0.0, r.l2}, {2.51, 3.0 * r.l2}};
    r.dissipation = rate * r.l2 * r.l2;
    out.push_back(r);
  }
  return out;
}

Trajectory exact_line_run(double dt, double t_end, const ModelParams& model, LineField data,
                          std::vector<double> orders = {0.0}) {
  SimConfig config;
  config.scheme = Scheme::ExactLine;
  config.dt = dt;
  config.t_end = t_end;
  config.model = model;
  config.sobolev_orders = std::move(orders);
  return integrate(data, config);
}

}  // namespace

TEST_CASE("decay fit recovers exponential rates") {
  const auto records = exponential_records(0.5, 40, 0.1);
  const auto fit = decay_fit(records, 2.51, 0.5);
  CHECK(fit.rate == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.prefactor == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.reference_rate == 0.5);

  // Constant data: zero rate and a perfect fit.
  const auto flat = decay_fit(exponential_records(0.0, 10, 0.1), 0.0, 0.5);
  CHECK(flat.rate == 0.0);
  CHECK(flat.r_squared == 1.0);

  CHECK_THROWS_AS(decay_fit(std::span(records).first(5), 0.0, 0.5), Error);
  CHECK_THROWS_AS(decay_fit(records, 1.0, 0.5), Error);
}

TEST_CASE("the warm-up fraction is excluded from fits") {
  auto records = exponential_records(1.0, 40, 0.1);
  // Corrupt the first two records (floor(0.05 * 40) = 2 are skipped).
  records[0].hs[0].second *= 10;
  records[1].hs[0].second *= 10;
  CHECK(decay_fit(records, 0.0, 1.0).rate == doctest::Approx(-1.0).epsilon(1e-12));
  records[2].hs[0].second *= 10;
  CHECK(decay_fit(records, 0.0, 1.0).rate != doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("semigroup decay fits reproduce -sigma(p)") {
  const auto line = canonicalize_line(FrequencyVector{1, 2, 3});
  ModelParams model;
  model.eps_hyper = 0.03;
  model.eps_kappa = 0.2;
  model.gamma = 0.4;
  LineField data(line, 4);
  data.set_pair(1, Complex(0.3, -0.2));
  const auto traj = exact_line_run(0.05, 3.0, model, data, {0.0, 2.51, 4.51});
  const double sigma = linear_symbol(line.p, model);
  for (const double s : traj.orders) CHECK(decay_fit(traj.records, s, sigma).rate == doctest::Approx(-sigma).epsilon(1e-6));
}

TEST_CASE("energy law on exact line trajectories") {
  const auto line = canonicalize_line(FrequencyVector{1, 1, 1});
  const auto data = random_line_data(line, 8, 1.0, 12);
  // Trapezoidal quadrature is second order: at unit decay the record spacing
  // must be ~3e-5 for a 1e-10 balance.
  const auto dense = exact_line_run(2.5e-5, 1.0, ModelParams{}, data);
  CHECK(energy_law_residual(dense.records) <= 1e-10);

  const auto coarse = exact_line_run(0.01, 1.0, ModelParams{}, data);
  const double r = energy_law_residual(coarse.records);
  CHECK(r > 1e-10);
  CHECK(r < 1e-5);
  // The per-step ledger uses slopes and is fourth order.
  const auto fine = exact_line_run(0.005, 1.0, ModelParams{}, data);
  const double ledger_coarse = coarse.records.back().energy_residual;
  const double ledger_fine = fine.records.back().energy_residual;
  CHECK(ledger_coarse < 1e-10);
  CHECK(std::log2(ledger_coarse / ledger_fine) == doctest::Approx(4.0).epsilon(0.05));

  CHECK_THROWS_AS(energy_law_residual(std::span(coarse.records).first(1)), Error);
}

TEST_CASE("energy law residual is invariant under time translation") {
  const auto line = canonicalize_line(FrequencyVector{1, 1, 1});
  const auto traj = exact_line_run(0.02, 2.0, ModelParams{}, random_line_data(line, 6, 1.0, 3));
  const std::span all(traj.records);
  const double first = energy_law_residual(all.subspan(0, 30));
  const double later = energy_law_residual(all.subspan(50, 30));
  CHECK(later == doctest::Approx(first).epsilon(1e-9));

  auto shifted = traj.records;
  for (auto& r : shifted) r.t += 17.0;
  CHECK(energy_law_residual(shifted) == doctest::Approx(energy_law_residual(traj.records)).epsilon(1e-9));
}

TEST_CASE("bootstrap inequalities") {
  const double eps = 0.01;
  std::vector<DiagnosticsRecord> records;
  for (int i = 0; i < 10; ++i) {
    DiagnosticsRecord r;
    r.t = 0.1 * i;
    r.hs = {{2.51, eps * std::exp(-0.5 * r.t)}, {4.51, eps}};
    records.push_back(r);
  }
  auto report = bootstrap_check(records, eps, 0.5, 0.01, 0.5);
  CHECK(report.kappa == doctest::Approx(4.51));
  CHECK(report.low_order_ok);
  CHECK(report.kappa_ok);
  CHECK(report.low_order_margin == doctest::Approx(2.0));
  CHECK(report.kappa_margin == doctest::Approx(2.0));
  CHECK_FALSE(report.first_violation_time);

  records[4].hs[1].second = 3 * eps;
  report = bootstrap_check(records, eps, 0.5, 0.01, 0.5);
  CHECK_FALSE(report.kappa_ok);
  CHECK(report.low_order_ok);
  REQUIRE(report.first_violation_time);
  CHECK(*report.first_violation_time == doctest::Approx(0.4));

  records.front().hs.pop_back();
  CHECK_THROWS_AS(bootstrap_check(records, eps, 0.5, 0.01, 0.5), Error);
}

TEST_CASE("empirical constant of the energy estimate") {
  // Pure decay at exactly m_lower: C = 0.
  auto records = exponential_records(0.5, 20, 0.05);
  CHECK(empirical_Cs(records, 0.0, 0.01, 0.5, 1.0).value == doctest::Approx(0.0).epsilon(1e-6));

  // Slower decay than m_lower needs a positive constant, binding where
  // the H^{5/2+} norm is smallest relative to the deficit.
  auto slow = exponential_records(0.25, 20, 0.05);
  const auto c = empirical_Cs(slow, 0.0, 0.01, 0.5, 1.0);
  CHECK(c.value > 0);
  REQUIRE(c.binding_time);
  CHECK(*c.binding_time == doctest::Approx(slow[slow.size() - 2].t));
  CHECK_THROWS_AS(empirical_Cs(std::span(slow).first(2), 0.0, 0.01, 0.5, 1.0), Error);
}

TEST_CASE("CSV schema") {
  const auto records = exponential_records(0.5, 2, 0.5);
  std::ostringstream os;
  const std::vector<double> orders{0.0, 2.51};
  write_diagnostics_csv(os, orders, records);
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "t,l2,hs_0,hs_2.51,sqrtM3_energy,energy_residual,leakage,max_div,projected_mass");
  CHECK(row == "0,1,1,3,0,0,0,0,0");
}

TEST_CASE("line records carry exact invariants") {
  const auto line = canonicalize_line(FrequencyVector{2, 1, 1});
  const auto data = random_line_data(line, 5, 1.0, 1);
  const auto traj = exact_line_run(0.1, 0.5, ModelParams{}, data);
  for (const auto& r : traj.records) {
    CHECK(r.leakage == 0.0);
    CHECK(r.max_divergence <= 1e-15);
    CHECK(r.projected_mass <= 1e-15);
    CHECK(r.sqrtM3_energy == doctest::Approx(line_constants(line).m_lower * r.l2 * r.l2));
  }
}
