#include "mg/lattice.hpp"

#include <charconv>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "mg/error.hpp"

namespace mg {

namespace {

std::int64_t abs64(std::int64_t v) { return v < 0 ? -v : v; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorKind::InvalidArgument, "not an integer: '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

std::string to_string(const FrequencyVector& k) {
  std::ostringstream os;
  os << '(' << k.k1 << ',' << k.k2 << ',' << k.k3 << ')';
  return os.str();
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << '/' << r.denominator();
  return os.str();
}

ConeSpec::ConeSpec(Rational aperture) : aperture_(aperture) {
  if (aperture_.numerator() <= 0) {
    throw Error(ErrorKind::NonpositiveAperture, "cone aperture must be positive, got " + to_string(aperture_));
  }
}

LineSpec canonicalize_line(const RationalTriple& q) {
  if (q[0].numerator() == 0 && q[1].numerator() == 0 && q[2].numerator() == 0) {
    throw Error(ErrorKind::ZeroDirection, "line direction must be nonzero");
  }
  std::int64_t common = 1;
  for (const auto& c : q) common = std::lcm(common, c.denominator());

  std::array<std::int64_t, 3> m{};
  std::int64_t g = 0;
  for (int i = 0; i < 3; ++i) {
    m[i] = q[i].numerator() * (common / q[i].denominator());
    g = std::gcd(g, abs64(m[i]));
  }
  for (auto& v : m) v /= g;

  const std::int64_t leading = m[0] != 0 ? m[0] : (m[1] != 0 ? m[1] : m[2]);
  if (leading < 0) {
    for (auto& v : m) v = -v;
  }
  return LineSpec{FrequencyVector{m[0], m[1], m[2]}, q};
}

LineSpec canonicalize_line(const FrequencyVector& direction) {
  return canonicalize_line(RationalTriple{Rational(direction.k1), Rational(direction.k2), Rational(direction.k3)});
}

void require_admissible(const LineSpec& line) {
  if (line.degenerate()) {
    throw Error(ErrorKind::DegenerateLine,
                "line " + to_string(line.p) + " has p3 = 0; all of its modes violate zero vertical mean");
  }
}

bool cone_contains(const ConeSpec& cone, const RationalTriple& q) {
  if (q[0].numerator() == 0 && q[1].numerator() == 0 && q[2].numerator() == 0) {
    throw Error(ErrorKind::ZeroDirection, "cone membership of the zero vector is undefined");
  }
  const Rational bound = cone.aperture() * abs(q[1]);
  return abs(q[0]) <= bound && abs(q[2]) <= bound;
}

bool line_contains(const LineSpec& line, const FrequencyVector& k) {
  if (k.is_zero()) return true;
  const std::array<std::int64_t, 3> p{line.p.k1, line.p.k2, line.p.k3};
  const std::array<std::int64_t, 3> kv{k.k1, k.k2, k.k3};
  std::int64_t n = 0;
  bool have_n = false;
  for (int i = 0; i < 3; ++i) {
    if (p[i] == 0) {
      if (kv[i] != 0) return false;
      continue;
    }
    if (kv[i] % p[i] != 0) return false;
    const std::int64_t ni = kv[i] / p[i];
    if (have_n && ni != n) return false;
    n = ni;
    have_n = true;
  }
  return have_n;
}

std::int64_t line_extent(const LineSpec& line, std::int64_t radius) {
  std::int64_t largest = abs64(line.p.k1);
  largest = std::max(largest, abs64(line.p.k2));
  largest = std::max(largest, abs64(line.p.k3));
  return radius < 0 ? 0 : radius / largest;
}

std::vector<std::int64_t> line_modes(const LineSpec& line, std::int64_t radius) {
  const std::int64_t extent = line_extent(line, radius);
  std::vector<std::int64_t> modes;
  modes.reserve(static_cast<std::size_t>(2 * extent));
  for (std::int64_t n = -extent; n <= extent; ++n) {
    if (n != 0) modes.push_back(n);
  }
  return modes;
}

Rational parse_rational(std::string_view text) {
  text = trim(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const std::int64_t den = parse_int(text.substr(slash + 1));
    if (den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator in '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash)), den);
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    // Decimal literals are converted exactly: 1.25 -> 125/100.
    std::string digits(text.substr(0, dot));
    const std::string_view frac = text.substr(dot + 1);
    digits += frac;
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    if (digits.empty() || digits == "-" || digits == "+") {
      throw Error(ErrorKind::InvalidArgument, "not a number: '" + std::string(text) + "'");
    }
    return Rational(parse_int(digits), scale);
  }
  return Rational(parse_int(text));
}

RationalTriple parse_rational_triple(std::string_view text) {
  RationalTriple out;
  int count = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (count >= 3) throw Error(ErrorKind::InvalidArgument, "expected three components in '" + std::string(text) + "'");
    out[count++] = parse_rational(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (count != 3) throw Error(ErrorKind::InvalidArgument, "expected three components in '" + std::string(text) + "'");
  return out;
}

}  // namespace mg
