#pragma once

// Integer frequency lattice, frequency lines through the origin and the
// rational cone used to select them.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

namespace mg {

using Rational = boost::rational<std::int64_t>;
using RationalTriple = std::array<Rational, 3>;

struct FrequencyVector {
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
  std::int64_t k3 = 0;

  constexpr std::int64_t norm2() const { return k1 * k1 + k2 * k2 + k3 * k3; }
  constexpr bool is_zero() const { return k1 == 0 && k2 == 0 && k3 == 0; }

  friend constexpr bool operator==(const FrequencyVector&, const FrequencyVector&) = default;
  friend constexpr FrequencyVector operator+(const FrequencyVector& a, const FrequencyVector& b) {
    return {a.k1 + b.k1, a.k2 + b.k2, a.k3 + b.k3};
  }
  friend constexpr FrequencyVector operator-(const FrequencyVector& a, const FrequencyVector& b) {
    return {a.k1 - b.k1, a.k2 - b.k2, a.k3 - b.k3};
  }
  friend constexpr FrequencyVector operator-(const FrequencyVector& a) { return {-a.k1, -a.k2, -a.k3}; }
  friend constexpr FrequencyVector operator*(std::int64_t n, const FrequencyVector& a) {
    return {n * a.k1, n * a.k2, n * a.k3};
  }
};

std::string to_string(const FrequencyVector& k);

/// Lattice points of a rational line through the origin, stored as the
/// primitive integer direction `p` (gcd 1, first nonzero component positive)
/// together with the rational triple it was built from.
struct LineSpec {
  FrequencyVector p;
  RationalTriple q;

  /// Lines with p3 = 0 carry only k3 = 0 modes, which the zero-vertical-mean
  /// constraint forces to vanish. They are valid for symbol inspection only.
  bool degenerate() const { return p.k3 == 0; }
  FrequencyVector mode(std::int64_t n) const { return n * p; }

  friend bool operator==(const LineSpec& a, const LineSpec& b) { return a.p == b.p; }
};

/// Rational cone |q1|, |q3| <= C |q2|.
class ConeSpec {
 public:
  explicit ConeSpec(Rational aperture);
  const Rational& aperture() const { return aperture_; }

 private:
  Rational aperture_;
};

LineSpec canonicalize_line(const RationalTriple& q);
LineSpec canonicalize_line(const FrequencyVector& direction);

/// Throws DegenerateLine when the line cannot carry zero-vertical-mean data.
void require_admissible(const LineSpec& line);

bool cone_contains(const ConeSpec& cone, const RationalTriple& q);
bool line_contains(const LineSpec& line, const FrequencyVector& k);

/// Nonzero n with |n p_i| <= radius for every component, ascending.
std::vector<std::int64_t> line_modes(const LineSpec& line, std::int64_t radius);

/// Largest n >= 0 with n*p inside the cube |k_i| <= radius.
std::int64_t line_extent(const LineSpec& line, std::int64_t radius);

/// Parses "a,b,c" where each entry is an integer or a fraction "n/d".
RationalTriple parse_rational_triple(std::string_view text);
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

}  // namespace mg
