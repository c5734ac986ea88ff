#include "mg/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "mg/error.hpp"

namespace mg {

namespace {

using Wide = __int128;

struct SymbolParts {
  Wide num1, num2, num3, den;
};

SymbolParts symbol_parts(const FrequencyVector& k) {
  const Wide k1 = k.k1, k2 = k.k2, k3 = k.k3;
  const Wide norm2 = k1 * k1 + k2 * k2 + k3 * k3;
  const Wide k2sq = k2 * k2;
  return {
      k2 * k3 * norm2 - k1 * k2sq * k3,
      -k1 * k3 * norm2 - k2sq * k2 * k3,
      k2sq * (k1 * k1 + k2sq),
      k3 * k3 * norm2 + k2sq * k2sq,
  };
}

std::int64_t narrow(Wide v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw Error(ErrorKind::InvalidArgument, "frequency too large for exact symbol evaluation");
  }
  return static_cast<std::int64_t>(v);
}

// Exact integers below 2^53 convert without error, so the quotient is
// correctly rounded.
double ratio(Wide num, Wide den) {
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace

std::array<Rational, 3> eval_M_exact(const FrequencyVector& k) {
  if (k.k3 == 0) return {Rational(0), Rational(0), Rational(0)};
  const SymbolParts s = symbol_parts(k);
  const std::int64_t den = narrow(s.den);
  return {Rational(narrow(s.num1), den), Rational(narrow(s.num2), den), Rational(narrow(s.num3), den)};
}

std::array<double, 3> eval_M(const FrequencyVector& k) {
  if (k.k3 == 0) return {0.0, 0.0, 0.0};
  const SymbolParts s = symbol_parts(k);
  return {ratio(s.num1, s.den), ratio(s.num2, s.den), ratio(s.num3, s.den)};
}

double eval_sqrtM3(const FrequencyVector& k) { return std::sqrt(eval_M(k)[2]); }

Complex eval_A(const FrequencyVector& k) {
  if (k.k3 == 0) {
    throw Error(ErrorKind::VerticalZeroMode, "A is undefined on k3 = 0, got " + to_string(k));
  }
  const double k2 = static_cast<double>(k.k2);
  const double k3 = static_cast<double>(k.k3);
  const double norm2 = static_cast<double>(k.norm2());
  const double norm = std::sqrt(norm2);
  const double k2_4 = k2 * k2 * k2 * k2;
  const double real_factor = (k3 * k3 * norm + k2_4) / (norm2 * norm2 + k2_4);
  // 1/(i k3) = -i/k3
  return Complex(0.0, -real_factor / k3);
}

std::array<Complex, 3> eval_b_multiplier(const FrequencyVector& k) {
  if (k.is_zero()) {
    throw Error(ErrorKind::ZeroFrequency, "magnetic multiplier is undefined at k = 0");
  }
  const auto m = eval_M(k);
  const double factor = static_cast<double>(k.k2) / static_cast<double>(k.norm2());
  return {Complex(0.0, factor * m[0]), Complex(0.0, factor * m[1]), Complex(0.0, factor * m[2])};
}

LineConstants line_constants(const LineSpec& line) {
  require_admissible(line);
  const auto m = eval_M(line.p);
  LineConstants out;
  out.components = m;
  out.m_lower = m[2];
  out.m_upper = std::max({std::abs(m[0]), std::abs(m[1]), std::abs(m[2])});
  return out;
}

ConeBounds cone_bounds(const ConeSpec& cone) {
  const double c = boost::rational_cast<double>(cone.aperture());
  const double c2 = c * c;
  const double c3 = c2 * c;
  const double c4 = c2 * c2;
  ConeBounds out;
  out.m_upper = std::max({c + 2.0 * c3 + c2, c2 + 2.0 * c4 + c, 1.0 + c2});
  out.m_lower = 1.0 / (c2 + 2.0 * c4 + 1.0);
  return out;
}

std::vector<std::int64_t> geometric_sweep(std::int64_t lo, std::int64_t hi, int points) {
  if (lo < 1 || hi < lo || points < 1) {
    throw Error(ErrorKind::InvalidArgument, "geometric sweep needs 1 <= lo <= hi and points >= 1");
  }
  std::vector<std::int64_t> out;
  const double ratio_total = static_cast<double>(hi) / static_cast<double>(lo);
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    const auto v = static_cast<std::int64_t>(std::llround(static_cast<double>(lo) * std::pow(ratio_total, f)));
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  return out;
}

ProbeResult asymptotic_probe(double r, std::span<const std::int64_t> k1_sweep) {
  if (!(r > 0.0 && r <= 0.5)) {
    throw Error(ErrorKind::InvalidArgument, "probe exponent must lie in (0, 1/2]");
  }
  if (k1_sweep.size() < 6) {
    throw Error(ErrorKind::InsufficientSweep,
                "probe needs at least 6 sweep points, got " + std::to_string(k1_sweep.size()));
  }
  ProbeResult out;
  out.r = r;
  out.k1.assign(k1_sweep.begin(), k1_sweep.end());
  std::vector<double> x;
  std::array<std::vector<double>, 3> y;
  for (const std::int64_t k1 : k1_sweep) {
    if (k1 < 1) throw Error(ErrorKind::InvalidArgument, "probe sweep must be positive");
    const auto k2 = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(k1), r)));
    const auto m = eval_M({k1, k2, 1});
    x.push_back(std::log(static_cast<double>(k1)));
    for (int j = 0; j < 3; ++j) {
      if (m[j] == 0.0) throw Error(ErrorKind::InvalidArgument, "symbol vanishes on probe point");
      y[j].push_back(std::log(std::abs(m[j])));
    }
  }
  for (int j = 0; j < 3; ++j) out.slopes[j] = least_squares_slope(x, y[j]);
  return out;
}

SymbolTable::SymbolTable(const GridSpec& grid) : grid_(grid) {
  const std::size_t n = grid.size();
  m1_.resize(n);
  m2_.resize(n);
  m3_.resize(n);
  sqrt_m3_.resize(n);
  norm2_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FrequencyVector k = grid.wavevector(i);
    const auto m = eval_M(k);
    m1_[i] = m[0];
    m2_[i] = m[1];
    m3_[i] = m[2];
    sqrt_m3_[i] = std::sqrt(m[2]);
    norm2_[i] = static_cast<double>(k.norm2());
  }
}

std::shared_ptr<const SymbolTable> SymbolTable::shared(const GridSpec& grid) {
  static std::mutex mutex;
  static std::map<int, std::weak_ptr<const SymbolTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[grid.N];
  if (auto existing = slot.lock()) return existing;
  auto table = std::make_shared<const SymbolTable>(grid);
  slot = table;
  return table;
}

}  // namespace mg
