#include <doctest.h>

#include <cmath>

#include "mg/error.hpp"
#include "mg/symbols.hpp"
#include "oracles.hpp"

using namespace mg;

namespace {

template <typename Fn>
void for_cube(int n, Fn&& fn) {
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b)
      for (int c = -n; c <= n; ++c) fn(FrequencyVector{a, b, c});
}

}  // namespace

TEST_CASE("closed-form symbols solve the magnetostatic balance") {
  for_cube(8, [](const FrequencyVector& k) {
    if (k.k3 == 0) return;
    const auto exact = eval_M_exact(k);
    const auto sol = oracle::solve_balance(k);
    for (int j = 0; j < 3; ++j) {
      INFO("k = ", to_string(k), " j = ", j);
      CHECK(oracle::equals(sol.num[j], sol.den, exact[j]));
    }
  });
}

TEST_CASE("hand-computed values") {
  // k = (1,1,1): |k|^2 = 3, D = 4.
  const auto m = eval_M_exact({1, 1, 1});
  CHECK(m[0] == Rational(1, 2));
  CHECK(m[1] == Rational(-1));
  CHECK(m[2] == Rational(1, 2));
  // k = (0,0,1): the vertical wavevector carries no velocity.
  for (const auto& v : eval_M_exact({0, 0, 1})) CHECK(v.numerator() == 0);
  // k = (2,1,1): |k|^2 = 6, D = 7.
  const auto n = eval_M_exact({2, 1, 1});
  CHECK(n[0] == Rational(4, 7));
  CHECK(n[1] == Rational(-13, 7));
  CHECK(n[2] == Rational(5, 7));
}

TEST_CASE("divergence-free, even, homogeneous, zero on k3 = 0") {
  for_cube(6, [](const FrequencyVector& k) {
    const auto m = eval_M_exact(k);
    INFO("k = ", to_string(k));
    const Rational div = Rational(k.k1) * m[0] + Rational(k.k2) * m[1] + Rational(k.k3) * m[2];
    CHECK(div.numerator() == 0);
    CHECK(eval_M_exact(-k) == m);
    CHECK(eval_M_exact(3 * k) == m);
    if (k.k3 == 0) {
      for (const auto& v : m) CHECK(v.numerator() == 0);
    } else if (k.k2 != 0) {
      CHECK(m[2].numerator() > 0);
    }
  });
}

TEST_CASE("double evaluation and tables agree with exact values") {
  const GridSpec grid(6);
  const SymbolTable table(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const FrequencyVector k = grid.wavevector(i);
    const auto exact = eval_M_exact(k);
    const auto approx = eval_M(k);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(approx[j] - boost::rational_cast<double>(exact[j])) <= 1e-15);
    CHECK(table.M1()[i] == approx[0]);
    CHECK(table.M2()[i] == approx[1]);
    CHECK(table.M3()[i] == approx[2]);
    CHECK(table.sqrtM3()[i] == doctest::Approx(std::sqrt(approx[2])).epsilon(1e-15));
    CHECK(table.norm2()[i] == static_cast<double>(k.norm2()));
  }
  CHECK(SymbolTable::shared(grid) == SymbolTable::shared(grid));
}

TEST_CASE("line constants") {
  const auto c = line_constants(canonicalize_line(FrequencyVector{1, 1, 1}));
  CHECK(c.m_lower == 0.5);
  CHECK(c.m_upper == 1.0);

  // p = (0,1,1): |k|^2 = 2, D = 3, M = (2/3, -1/3, 1/3).
  const auto d = line_constants(canonicalize_line(FrequencyVector{0, 1, 1}));
  const auto m = eval_M({0, 1, 1});
  CHECK(d.m_lower == m[2]);
  CHECK(d.m_upper == std::max({std::abs(m[0]), std::abs(m[1]), std::abs(m[2])}));
  CHECK(d.m_lower == doctest::Approx(1.0 / 3.0));
  CHECK(d.m_upper == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("cone bounds") {
  const auto one = cone_bounds(ConeSpec(Rational(1)));
  CHECK(one.m_lower == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(one.m_upper == doctest::Approx(4.0).epsilon(1e-15));

  const auto two = cone_bounds(ConeSpec(Rational(2)));
  CHECK(two.m_lower == doctest::Approx(1.0 / 37.0).epsilon(1e-15));
  CHECK(two.m_upper == doctest::Approx(38.0).epsilon(1e-15));

  // Every lattice point of the C = 1 cone respects the bounds.
  for_cube(5, [&](const FrequencyVector& k) {
    if (k.k3 == 0 || k.k2 == 0) return;
    if (std::abs(k.k1) > std::abs(k.k2) || std::abs(k.k3) > std::abs(k.k2)) return;
    const auto m = eval_M(k);
    CHECK(m[2] >= one.m_lower);
    for (const double v : m) CHECK(std::abs(v) <= one.m_upper);
  });
}

TEST_CASE("curved-region growth exponents") {
  const auto sweep = geometric_sweep(64, 4096, 25);
  CHECK(sweep.front() == 64);
  CHECK(sweep.back() == 4096);
  CHECK(std::is_sorted(sweep.begin(), sweep.end()));

  const auto half = asymptotic_probe(0.5, sweep);
  CHECK(half.slopes[0] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(half.slopes[1] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(half.slopes[2] == doctest::Approx(1.0).epsilon(0.05));

  const auto quarter = asymptotic_probe(0.25, sweep);
  CHECK(quarter.slopes[0] == doctest::Approx(0.25).epsilon(0.1));
  CHECK(quarter.slopes[1] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(quarter.slopes[2] == doctest::Approx(0.5).epsilon(0.1));

  CHECK_THROWS_AS(geometric_sweep(0, 10, 5), Error);
  const std::vector<std::int64_t> short_sweep{64, 128, 256};
  try {
    asymptotic_probe(0.5, short_sweep);
    FAIL("short sweep accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientSweep);
  }
}

TEST_CASE("magnetic multiplier and the printed A symbol") {
  const FrequencyVector k{1, 2, 1};
  const auto m = eval_M(k);
  const auto b = eval_b_multiplier(k);
  for (int j = 0; j < 3; ++j) {
    CHECK(b[j].real() == 0.0);
    CHECK(b[j].imag() == doctest::Approx(2.0 / 6.0 * m[j]));
  }
  // (1/(i k3)) (k3^2 |k| + k2^4) / (|k|^4 + k2^4) at k = (1,2,1).
  const Complex a = eval_A(k);
  const double expected = (std::sqrt(6.0) + 16.0) / (36.0 + 16.0);
  CHECK(a.real() == doctest::Approx(0.0));
  CHECK(a.imag() == doctest::Approx(-expected));
}
