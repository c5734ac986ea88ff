#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "mg/error.hpp"
#include "mg/fields.hpp"
#include "oracles.hpp"

using namespace mg;

namespace {

const std::filesystem::path kScratch = MG_TEST_SCRATCH;

double energy(const SpectralField& f) {
  double e = 0;
  for (const Complex& c : f.coeffs()) e += std::norm(c);
  return e;
}

}  // namespace

TEST_CASE("grid indexing round trip") {
  const GridSpec grid(3);
  CHECK(grid.extent() == 7);
  CHECK(grid.size() == 343);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(grid.index(grid.wavevector(i)) == i);
  CHECK(grid.wavevector(0) == FrequencyVector{-3, -3, -3});
  // Mirror of index i is size - 1 - i.
  CHECK(grid.index(-grid.wavevector(10)) == grid.size() - 11);
}

TEST_CASE("transform sizes and padding") {
  CHECK(next_fast_size(7) == 8);
  CHECK(next_fast_size(11) == 12);
  CHECK(next_fast_size(49) == 50);
  CHECK(next_fast_size(97) == 100);
  CHECK(GridSpec(16, 1.5).transform_size() == 50);
  CHECK(GridSpec(16, 1.5).dealiased());
  CHECK(GridSpec(6, 1.0).transform_size() == 15);
  CHECK_FALSE(GridSpec(6, 1.0).dealiased());
  CHECK_THROWS_AS(GridSpec(1), Error);
  CHECK_THROWS_AS(GridSpec(4, 0.5), Error);
}

TEST_CASE("hermitian pairs and projection") {
  SpectralField f(GridSpec(3));
  f.set_pair({1, 2, 1}, Complex(1, 2));
  CHECK(f.at({-1, -2, -1}) == Complex(1, -2));
  CHECK(f.hermitian_defect() == 0.0);
  CHECK(f.vertical_mean_defect() == 0.0);

  f.at({1, 1, 0}) = Complex(3, 0);
  f.at({0, 0, 2}) = Complex(0, 1);  // breaks the pair symmetry
  CHECK(f.vertical_mean_defect() == 3.0);
  CHECK(f.hermitian_defect() > 0.0);
  const double removed = f.project();
  CHECK(removed == doctest::Approx(3.0));
  CHECK(f.vertical_mean_defect() == 0.0);
  CHECK(f.hermitian_defect() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f.at({0, 0, 2}) == Complex(0, 0.5));
}

TEST_CASE("Sobolev norms") {
  CHECK(sobolev_weight(3.0, 1.0, SobolevKind::Inhomogeneous) == 4.0);
  CHECK(sobolev_weight(3.0, 1.0, SobolevKind::Homogeneous) == 3.0);
  CHECK(sobolev_weight(0.0, 0.0, SobolevKind::Homogeneous) == 0.0);

  SpectralField f(GridSpec(4));
  f.set_pair({1, 1, 1}, 1.0);  // |k|^2 = 3, two modes of modulus 1
  CHECK(sobolev_norm(f, 0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(sobolev_norm(f, 2) == doctest::Approx(std::sqrt(2.0 * 16.0)));
  CHECK(sobolev_norm(f, 1.5, SobolevKind::Homogeneous) == doctest::Approx(std::sqrt(2.0 * std::pow(3.0, 1.5))));

  // Norms increase with the order.
  const auto g = random_field(GridSpec(4), 4, 1.0, 3);
  double prev = 0;
  for (const double s : {0.0, 0.5, 1.0, 2.51, 4.51}) {
    const double v = sobolev_norm(g, s);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("line embedding is exact and restriction measures leakage") {
  const auto line = canonicalize_line(FrequencyVector{1, 2, 1});
  const auto data = random_line_data(line, 3, 1.0, 11);
  CHECK(data.hermitian_defect() == 0.0);
  for (std::int64_t n = 1; n <= 3; ++n) CHECK(std::abs(data.at(n)) == doctest::Approx(std::pow(n, -1.0)));

  const GridSpec grid(6);
  const SpectralField f = embed_line(data, grid);
  CHECK(f.support_size() == 6);
  CHECK(sobolev_norm(f, 2.0) == doctest::Approx(sobolev_norm(data, 2.0)).epsilon(1e-14));

  auto back = restrict_line(f, line);
  CHECK(back.leakage == 0.0);
  for (std::int64_t n = -3; n <= 3; ++n) CHECK(back.field.at(n) == data.at(n));

  SpectralField noisy = f;
  noisy.set_pair({1, 1, 1}, 1e-3);
  back = restrict_line(noisy, line);
  const double off = 2e-6;
  CHECK(back.leakage == doctest::Approx(std::sqrt(off / (energy(f) + off))));

  CHECK(restrict_line(SpectralField(grid), line).leakage == 0.0);
  CHECK_THROWS_AS(embed_line(data, GridSpec(4)), Error);
  CHECK_THROWS_AS(LineField(canonicalize_line(FrequencyVector{1, 0, 0}), 4), Error);
}

TEST_CASE("random data is seeded and respects the constraints") {
  const GridSpec grid(5);
  const auto a = random_field(grid, 3, 2.0, 42);
  const auto b = random_field(grid, 3, 2.0, 42);
  const auto c = random_field(grid, 3, 2.0, 43);
  CHECK(std::equal(a.coeffs().begin(), a.coeffs().end(), b.coeffs().begin()));
  CHECK_FALSE(std::equal(a.coeffs().begin(), a.coeffs().end(), c.coeffs().begin()));
  CHECK(a.hermitian_defect() == 0.0);
  CHECK(a.vertical_mean_defect() == 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = grid.wavevector(i);
    const double amp = std::abs(a.coeffs()[i]);
    const bool inside = std::max({std::abs(k.k1), std::abs(k.k2), std::abs(k.k3)}) <= 3 && k.k3 != 0;
    if (inside) {
      CHECK(amp == doctest::Approx(std::pow(static_cast<double>(k.norm2()), -1.0)));
    } else {
      CHECK(amp == 0.0);
    }
  }
}

TEST_CASE("physical transforms invert each other") {
  const GridSpec grid(5);
  const auto f = random_field(grid, 5, 0.5, 9);
  const PhysicalField p = to_physical(f);
  CHECK(p.M == grid.transform_size());

  // Compare one sample against the explicit Fourier sum.
  const int i1 = 3, i2 = 7, i3 = 1;
  const double h = 2.0 * M_PI / p.M;
  Complex direct = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = grid.wavevector(i);
    const double phase = h * static_cast<double>(k.k1 * i1 + k.k2 * i2 + k.k3 * i3);
    direct += f.coeffs()[i] * std::polar(1.0, phase);
  }
  CHECK(std::abs(direct.imag()) < 1e-12);
  CHECK(p.at(i1, i2, i3) == doctest::Approx(direct.real()).epsilon(1e-12));

  const SpectralField back = from_physical(p, grid);
  CHECK(oracle::relative_distance(back, f) < 1e-14);
}

TEST_CASE("MGSF snapshots round trip bit-exactly") {
  const auto dir = oracle::scratch_dir(kScratch, "snapshots");
  const auto f = random_field(GridSpec(4), 4, 1.0, 5);
  SnapshotMeta meta;
  meta.time = 0.25;
  meta.line = canonicalize_line(FrequencyVector{1, 1, 1});
  meta.eps_hyper = 0.1;
  write_snapshot(dir / "f.mgsf", f, meta);
  CHECK(std::filesystem::exists(dir / "f.mgsf.json"));

  const std::string bytes = oracle::slurp(dir / "f.mgsf");
  CHECK(bytes.substr(0, 4) == "MGSF");
  CHECK(bytes.size() == 4 + 2 + 4 + 16 * f.coeffs().size());

  const auto g = read_snapshot(dir / "f.mgsf");
  CHECK(g.grid().N == 4);
  CHECK(std::equal(f.coeffs().begin(), f.coeffs().end(), g.coeffs().begin()));

  std::filesystem::resize_file(dir / "f.mgsf", 40);
  CHECK_THROWS_AS(read_snapshot(dir / "f.mgsf"), Error);
  CHECK_THROWS_AS(read_snapshot(dir / "missing.mgsf"), Error);
}
