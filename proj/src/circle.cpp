#include "ergolab/circle.hpp"

#include <algorithm>
#include <string>

#include "ergolab/errors.hpp"

namespace ergolab {

CirclePoint CirclePoint::from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("circle coordinate must be finite");
  double r = x - std::floor(x);
  // Scaling by 2^64 is exact; only the final rounding to an integer loses bits.
  const double scaled = std::nearbyint(std::ldexp(r, 64));
  if (scaled >= 0x1p64) return {0};
  return {static_cast<std::uint64_t>(scaled)};
}

CircleArc CircleArc::between(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || lo > 1.0 || hi < 0.0 || hi > 1.0) {
    throw DomainError("circle interval bounds must lie in [0,1], got [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + ")");
  }
  if (hi - lo >= 1.0) return whole();
  const CirclePoint a = CirclePoint::from_double(lo);
  const CirclePoint b = CirclePoint::from_double(hi);
  return {a, b.frac - a.frac, false};
}

double CircleArc::measure() const { return units_to_measure(units()); }

double units_to_measure(unsigned __int128 units) {
  return std::ldexp(static_cast<double>(units), -64);
}

unsigned __int128 overlap_units(const CircleArc& a, const CircleArc& b) {
  if (a.full) return b.units();
  if (b.full) return a.units();
  using U = unsigned __int128;
  const U one = static_cast<U>(1) << 64;
  // Rotate so that a = [0, la); b = [d, d + lb) possibly spilling past 1.
  const U la = a.length;
  const U lb = b.length;
  const U d = static_cast<std::uint64_t>(b.start.frac - a.start.frac);
  U total = 0;
  if (d < la) total += std::min(la, d + lb) - d;
  if (d + lb > one) total += std::min(la, d + lb - one);
  return total;
}

}  // namespace ergolab
