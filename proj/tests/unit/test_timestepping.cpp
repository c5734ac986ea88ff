#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mg/error.hpp"
#include "mg/timestepping.hpp"
#include "oracles.hpp"

using namespace mg;

namespace {

SpectralField evolve(const SpectralField& theta0, double t_end, std::int64_t steps, const ModelParams& params) {
  IfRk4Stepper<SpectralField> stepper(theta0.grid(), params, t_end / static_cast<double>(steps));
  SpectralField theta = theta0;
  for (std::int64_t n = 0; n < steps; ++n) theta = stepper.step(theta);
  return theta;
}

}  // namespace

TEST_CASE("semigroup is the exact linear flow") {
  ModelParams params;
  params.eps_hyper = 0.05;
  const GridSpec grid(3);
  const auto theta = random_field(grid, 3, 1.0, 1);
  const auto out = semigroup_apply(theta, 0.7, params);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double sigma = linear_symbol(grid.wavevector(i), params);
    CHECK(std::abs(out.coeffs()[i] - std::exp(-0.7 * sigma) * theta.coeffs()[i]) <= 1e-15);
  }
  // Semigroup property.
  const auto twice = semigroup_apply(semigroup_apply(theta, 0.3, params), 0.4, params);
  CHECK(oracle::relative_distance(twice, out) < 1e-14);
  CHECK_THROWS_AS(semigroup_apply(theta, -1.0, params), Error);
}

TEST_CASE("IF-RK4 reproduces the semigroup when transport vanishes") {
  const auto line = canonicalize_line(FrequencyVector{1, 2, 1});
  const auto data = random_line_data(line, 10, 1.0, 3);
  ModelParams params;
  params.eps_kappa = 0.02;
  params.gamma = 0.75;
  IfRk4Stepper<LineField> stepper(line, 10, params, 0.1);
  LineField theta = data;
  for (int n = 0; n < 20; ++n) theta = stepper.step(theta);
  const auto exact = semigroup_apply(data, 2.0, params);
  for (std::int64_t n = -10; n <= 10; ++n) CHECK(std::abs(theta.at(n) - exact.at(n)) <= 1e-15);
}

TEST_CASE("IF-RK4 converges at fourth order") {
  const GridSpec grid(4);
  auto theta0 = random_field(grid, 4, 1.0, 17);
  for (Complex& c : theta0.coeffs()) c *= 0.5;
  const ModelParams params;
  const double t_end = 0.5;
  const auto a = evolve(theta0, t_end, 8, params);
  const auto b = evolve(theta0, t_end, 16, params);
  const auto c = evolve(theta0, t_end, 32, params);
  const auto d = evolve(theta0, t_end, 64, params);
  const double e1 = oracle::relative_distance(a, b);
  const double e2 = oracle::relative_distance(b, c);
  const double e3 = oracle::relative_distance(c, d);
  MESSAGE("successive differences ", e1, " ", e2, " ", e3);
  CHECK(e1 > 1e-12);  // the transport is not negligible
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.1));
  CHECK(std::log2(e2 / e3) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("integrate records on schedule") {
  const auto line = canonicalize_line(FrequencyVector{1, 1, 1});
  const auto data = random_line_data(line, 6, 2.0, 5);
  SimConfig config;
  config.dt = 0.1;
  config.t_end = 1.0;
  config.record_every = 3;
  config.sobolev_orders = {0.0, 1.0};
  const auto traj = integrate(data, config);
  CHECK(traj.steps_taken == 10);
  REQUIRE(traj.records.size() == 5);  // steps 0, 3, 6, 9 and the endpoint
  CHECK(traj.records[1].t == doctest::Approx(0.3));
  CHECK(traj.records.back().t == doctest::Approx(1.0));
  CHECK(traj.snapshots.size() == 2);
  CHECK(traj.records.front().hs_at(1.0) > traj.records.front().hs_at(0.0));
  CHECK_THROWS_AS(traj.records.front().hs_at(2.0), Error);

  config.t_end = 0;
  const auto still = integrate(data, config);
  CHECK(still.records.size() == 1);
  CHECK(still.steps_taken == 0);
  CHECK(still.records[0].l2 == doctest::Approx(sobolev_norm(data, 0)));

  config.t_end = 1.0;
  config.scheme = Scheme::Picard;
  CHECK_THROWS_AS(integrate(data, config), Error);
}

TEST_CASE("exact and stepped line trajectories agree") {
  const auto line = canonicalize_line(FrequencyVector{1, 1, 2});
  const auto data = random_line_data(line, 12, 1.0, 6);
  SimConfig config;
  config.dt = 0.05;
  config.t_end = 2.0;
  config.model.eps_hyper = 0.01;
  config.record_every = 4;
  const auto stepped = integrate(data, config);
  config.scheme = Scheme::ExactLine;
  const auto exact = integrate(data, config);
  REQUIRE(stepped.records.size() == exact.records.size());
  for (std::size_t i = 0; i < exact.records.size(); ++i) {
    CHECK(stepped.records[i].l2 == doctest::Approx(exact.records[i].l2).epsilon(1e-13));
  }
  CHECK(stepped.max_nonlinear_relative <= 1e-12);
}

TEST_CASE("blow-up is reported with its time") {
  const GridSpec grid(3);
  auto theta0 = random_field(grid, 3, 0.0, 2);
  for (Complex& c : theta0.coeffs()) c *= 1e3;
  SimConfig config;
  config.dt = 1.0;
  config.t_end = 200;
  const auto traj = integrate(theta0, config);
  REQUIRE(traj.blowup_time.has_value());
  CHECK(*traj.blowup_time <= 200.0);
  try {
    traj.require_finite();
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
  }
}

TEST_CASE("Picard iteration of zero data is an exact fixed point") {
  PicardConfig config;
  config.horizon = 0.5;
  const auto result = picard_solve(SpectralField(GridSpec(4)), config);
  CHECK(result.status == PicardStatus::ExactFixedPoint);
  for (const double d : result.differences) CHECK(d == 0.0);
  CHECK(result.ratios.size() == static_cast<std::size_t>(config.n_max - 1));
}

TEST_CASE("frozen-drift Picard iteration contracts within T_star_eps") {
  const GridSpec grid(4);
  const auto theta0 = random_field(grid, 4, 2.0, 31);
  PicardConfig config;
  config.eps = 0.1;
  config.drift = velocity(random_field(grid, 3, 2.0, 32));
  config.horizon = hyperdissipative_horizon(config.eps, 1.0, vector_sobolev_norm(*config.drift, config.s));
  const auto result = picard_solve(theta0, config);
  CHECK(result.norm_order == config.s);
  CHECK(result.steps == 64);
  CHECK(result.status == PicardStatus::Contracting);
  for (const double r : result.ratios) CHECK(r <= 0.55);
  CHECK_NOTHROW(result.require_convergence());

  // A longer horizon still converges, but the ratios grow with T.
  PicardConfig longer = config;
  longer.horizon *= 50;
  const auto slow = picard_solve(theta0, longer);
  CHECK(slow.ratios.front() > result.ratios.front());

  PicardConfig no_eps = config;
  no_eps.eps = 0;
  CHECK_THROWS_AS(picard_solve(theta0, no_eps), Error);
}

TEST_CASE("self-consistent Picard iteration contracts for small data") {
  const GridSpec grid(4);
  auto theta0 = random_field(grid, 3, 2.0, 8);
  for (Complex& c : theta0.coeffs()) c *= 0.05;
  PicardConfig config;
  config.eps = 0;
  config.s = 3.51;
  config.horizon = 0.5;
  const auto result = picard_solve(theta0, config);
  CHECK(result.norm_order == doctest::Approx(2.51));
  CHECK(result.status == PicardStatus::Contracting);
  for (const double r : result.ratios) CHECK(r < 1.0);
}

TEST_CASE("NoConvergence surfaces as an error") {
  PicardResult result;
  result.status = PicardStatus::NoConvergence;
  try {
    result.require_convergence();
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoConvergence);
  }
}

TEST_CASE("explicit times and thresholds") {
  CHECK(hyperdissipative_horizon(0.1, 1.0, 2.0) == doctest::Approx(0.1 / 8.0));
  CHECK(std::isinf(hyperdissipative_horizon(0.1, 1.0, 0.0)));

  const auto line = canonicalize_line(FrequencyVector{1, 1, 1});
  const AnalysisConstants k;
  const auto t = theoretical_times(0.1, 2.0, line, k, 0.1);
  // m_lower = 1/2, m_upper = 1: growth = (1 / sqrt(1/2) * 0.1)^2 = 0.02.
  CHECK(t.T_local == doctest::Approx(std::numbers::ln2 / 0.02));
  CHECK(t.T_combined == doctest::Approx((1.0 / 6.0) / 0.02));
  CHECK(t.T_star_eps == doctest::Approx(0.1 / 8.0));
  CHECK(t.epsilon0 == doctest::Approx(0.5 / 16.0 * 0.5));
  CHECK(std::isinf(theoretical_times(0.0, 0.0, line, k, 0.1).T_local));

  AnalysisConstants missing;
  missing.C_kappa.reset();
  try {
    theoretical_times(0.1, 2.0, line, missing, 0.1);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingConstants);
  }
  CHECK(k.kappa() == doctest::Approx(4.51));
}

TEST_CASE("configuration validation") {
  SimConfig c;
  c.dt = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.record_every = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.t_end = 1.0;
  c.dt = 0.3;
  CHECK(c.steps() == 4);
  c.dt = 0.1;
  CHECK(c.steps() == 10);
}
