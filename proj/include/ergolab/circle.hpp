#pragma once

// Exact arithmetic on the circle T = R/Z using 64-bit fixed point.
//
// A point u/2^64 is stored as the integer u; addition and integer scaling
// wrap mod 2^64, which is exactly reduction mod 1.

#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>

namespace ergolab {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct CirclePoint {
  std::uint64_t frac = 0;

  /// Nearest multiple of 2^-64 to x mod 1.
  static CirclePoint from_double(double x);

  /// Value in [0,1).
  double to_double() const { return std::ldexp(static_cast<double>(frac), -64); }

  /// Signed representative in [-1/2, 1/2).
  double centered() const {
    return std::ldexp(static_cast<double>(static_cast<std::int64_t>(frac)), -64);
  }

  /// n * this, mod 1. Wrapping 64-bit multiply equals the low half of the
  /// 128-bit product, so the result is exact.
  constexpr CirclePoint scaled(std::uint64_t n) const { return {frac * n}; }
  constexpr CirclePoint scaled_signed(std::int64_t k) const {
    return {frac * static_cast<std::uint64_t>(k)};
  }

  constexpr CirclePoint operator-() const { return {0 - frac}; }
  friend constexpr CirclePoint operator+(CirclePoint a, CirclePoint b) { return {a.frac + b.frac}; }
  friend constexpr CirclePoint operator-(CirclePoint a, CirclePoint b) { return {a.frac - b.frac}; }
  CirclePoint& operator+=(CirclePoint b) {
    frac += b.frac;
    return *this;
  }

  friend constexpr auto operator<=>(CirclePoint, CirclePoint) = default;
};

/// Nearest fixed-point value to (sqrt(5)-1)/2.
inline constexpr CirclePoint kGoldenRotation{0x9E3779B97F4A7C16ull};

/// e^{2 pi i t}.
inline Complex unit_phasor(CirclePoint t) {
  const double angle = kTwoPi * t.centered();
  return {std::cos(angle), std::sin(angle)};
}

/// Half-open arc [start, start + length) on the circle, lengths in units of
/// 2^-64. A full arc has length 2^64, which does not fit the field, so it is
/// flagged separately.
struct CircleArc {
  CirclePoint start;
  std::uint64_t length = 0;
  bool full = false;

  /// Arc from lo to hi (both in [0,1]); lo > hi wraps through 0.
  /// hi - lo >= 1 yields the full circle. Throws DomainError on non-finite
  /// or out-of-range bounds.
  static CircleArc between(double lo, double hi);
  static CircleArc whole() { return {{}, 0, true}; }

  bool contains(CirclePoint x) const { return full || (x.frac - start.frac) < length; }
  unsigned __int128 units() const {
    return full ? (static_cast<unsigned __int128>(1) << 64) : length;
  }
  double measure() const;

  friend bool operator==(const CircleArc&, const CircleArc&) = default;
};

/// Length of the intersection of two arcs, in units of 2^-64.
unsigned __int128 overlap_units(const CircleArc& a, const CircleArc& b);

/// Converts a count of 2^-64 units to a real in [0,1].
double units_to_measure(unsigned __int128 units);

}  // namespace ergolab
