#include "ergolab/sequences.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

using U128 = unsigned __int128;

U128 triangular(U128 m) { return m * (m + 1) / 2; }

}  // namespace

Complex trig_poly_eval(const TrigPolynomial& p, std::uint64_t n) {
  Complex s{};
  for (const auto& term : p.terms) s += term.coefficient * unit_phasor(term.frequency.scaled(n));
  return s;
}

ComplexSeq as_sequence(const TrigPolynomial& p) {
  double bound = 0.0;
  for (const auto& term : p.terms) bound += std::abs(term.coefficient);
  return ComplexSeq([p](std::uint64_t n) { return trig_poly_eval(p, n); }, bound);
}

std::uint64_t block_index(std::uint64_t n) {
  if (n == 0) throw DomainError("block_index needs n >= 1");
  auto m = static_cast<U128>(std::ceil((std::sqrt(8.0 * static_cast<double>(n) + 1.0) - 1.0) / 2.0));
  if (m == 0) m = 1;
  while (m > 1 && triangular(m - 1) >= n) --m;
  while (triangular(m) < n) ++m;
  return static_cast<std::uint64_t>(m);
}

std::function<std::uint64_t(std::uint64_t)> power_gaps(double exponent) {
  if (!(exponent >= 1.0)) throw DomainError("gap exponent must be >= 1");
  return [exponent](std::uint64_t m) {
    if (m <= 1) return std::uint64_t{0};
    const double v = std::floor(std::pow(static_cast<double>(m - 1), exponent));
    if (v >= 0x1p63) throw NumericGuardError("gap sequence exceeds 2^63");
    return static_cast<std::uint64_t>(v);
  };
}

std::function<CirclePoint(std::uint64_t)> rotation_points(CirclePoint beta, CirclePoint offset) {
  return [beta, offset](std::uint64_t m) { return offset + beta.scaled(m); };
}

std::function<CirclePoint(std::uint64_t)> van_der_corput_points() {
  return [](std::uint64_t m) {
    std::uint64_t r = 0;
    for (int b = 0; b < 64; ++b) {
      r = (r << 1) | (m & 1u);
      m >>= 1;
    }
    return CirclePoint{r};
  };
}

std::uint64_t generalized_block_index(const GeneralizedBlocks& g, std::uint64_t n) {
  if (n == 0) throw DomainError("block index needs n >= 1");
  if (g.gaps(1) != 0) throw DomainError("generalized gap sequence must start at k_1 = 0");
  // Largest m with k_m < n.
  std::uint64_t lo = 1;
  std::uint64_t hi = 2;
  while (g.gaps(hi) < n) {
    lo = hi;
    if (hi > (std::uint64_t{1} << 62)) throw NumericGuardError("gap sequence search overflow");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (g.gaps(mid) < n) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

Complex block_sequence(const BlockSpec& spec, std::uint64_t n) {
  if (spec.generalized) {
    const std::uint64_t m = generalized_block_index(*spec.generalized, n);
    return evaluate(spec.f, spec.generalized->points(m));
  }
  return evaluate(spec.f, spec.alpha.scaled(block_index(n)));
}

ComplexSeq block_sequence(const BlockSpec& spec) {
  if (!spec.f.on_circle()) throw IncompatibleError("block sequence needs a circle observable");
  return ComplexSeq([spec](std::uint64_t n) { return block_sequence(spec, n); }, spec.f.bound());
}

double besicovitch_distance(const ComplexSeq& x, const TrigPolynomial& p, std::uint64_t N, Parallelism par) {
  if (N == 0) throw DomainError("besicovitch_distance needs N >= 1");
  const double total =
      ordered_sum<double>(1, N, [&](std::uint64_t n) { return std::abs(x(n) - trig_poly_eval(p, n)); }, par);
  return total / static_cast<double>(N);
}

double compactness_statistic(const ComplexSeq& x, std::uint64_t K, std::uint64_t M, std::uint64_t N,
                             Parallelism par) {
  if (K == 0 || N == 0 || K > M) throw DomainError("compactness_statistic needs 1 <= K <= M and N >= 1");
  // values[j] = x_j for j in [1, N + M].
  std::vector<Complex> values(N + M + 1);
  x.fill(1, std::span<Complex>(values).subspan(1), par);

  double worst = 0.0;
  for (std::uint64_t m = K + 1; m <= M; ++m) {
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 1; k <= K; ++k) {
      const double total = ordered_sum<double>(
          1, N,
          [&](std::uint64_t n) {
            const Complex d = values[n + m] - values[n + k];
            return d.real() * d.real() + d.imag() * d.imag();
          },
          par);
      best = std::min(best, total / static_cast<double>(N));
    }
    worst = std::max(worst, best);
  }
  // For m <= K the choice k = m gives exactly 0.
  return worst;
}

SubsequenceSchedule::SubsequenceSchedule(std::vector<std::uint64_t> horizons) : horizons_(std::move(horizons)) {
  for (std::size_t q = 0; q < horizons_.size(); ++q) {
    if (horizons_[q] == 0) throw DomainError("schedule horizons must be positive");
    if (q > 0 && horizons_[q] <= horizons_[q - 1]) {
      throw DomainError("schedule horizons must be strictly increasing");
    }
  }
}

SubsequenceSchedule SubsequenceSchedule::arithmetic(std::uint64_t start, std::uint64_t step, std::size_t count) {
  if (step == 0) throw DomainError("arithmetic schedule step must be positive");
  std::vector<std::uint64_t> h(count);
  for (std::size_t q = 0; q < count; ++q) h[q] = start + q * step;
  return SubsequenceSchedule(std::move(h));
}

SubsequenceSchedule SubsequenceSchedule::geometric(std::uint64_t start, double ratio, std::uint64_t max) {
  if (!(ratio > 1.0)) throw DomainError("geometric schedule ratio must exceed 1");
  if (start == 0 || start > max) throw DomainError("geometric schedule needs 1 <= start <= max");
  std::vector<std::uint64_t> h{start};
  while (true) {
    const double next = std::ceil(static_cast<double>(h.back()) * ratio);
    const std::uint64_t n = std::max(h.back() + 1, static_cast<std::uint64_t>(std::min(next, 0x1p63)));
    if (n > max) break;
    h.push_back(n);
  }
  return SubsequenceSchedule(std::move(h));
}

GreedyResult greedy_schedule_detail(const ComplexSeq& x, std::size_t k_max, std::uint64_t N_probe,
                                    GreedyOptions opts) {
  if (k_max == 0 || N_probe == 0) throw DomainError("greedy_schedule needs k_max, N_probe >= 1");
  if (!(opts.ratio >= 1.0) || opts.tolerance < 0.0) throw DomainError("invalid greedy options");

  auto next_probe = [&](std::uint64_t g) {
    const double scaled = std::ceil(static_cast<double>(g) * opts.ratio);
    return std::max(g + 1, static_cast<std::uint64_t>(std::min(scaled, 0x1p63)));
  };

  // Pass 1: running means on the probe grid; the upper mean is the maximum
  // over the last half of the grid.
  std::vector<std::uint64_t> grid;
  std::vector<double> grid_mean;
  {
    CompensatedSum<double> s;
    std::uint64_t pos = 0;
    for (std::uint64_t g = 1; g <= N_probe; g = next_probe(g)) {
      while (pos < g) s.add(std::abs(x(++pos)));
      grid.push_back(g);
      grid_mean.push_back(s.value() / static_cast<double>(g));
    }
  }
  const std::size_t tail = grid.size() / 2;
  const double upper = *std::max_element(grid_mean.begin() + static_cast<std::ptrdiff_t>(tail), grid_mean.end());
  const double floor_mean = (1.0 - opts.tolerance) * upper;

  GreedyResult out;
  out.upper_mean = upper;

  // Pass 2: greedy levels.
  CompensatedSum<double> s;
  std::uint64_t pos = 0;
  auto advance = [&](std::uint64_t to) {
    while (pos < to) s.add(std::abs(x(++pos)));
    return s.value();
  };

  std::vector<std::uint64_t> horizons;
  std::uint64_t first = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid_mean[j] >= floor_mean) {
      first = grid[j];
      break;
    }
  }
  horizons.push_back(first);
  out.prefix_l1.push_back(advance(first));

  for (std::size_t k = 1; k < k_max; ++k) {
    const double threshold = static_cast<double>(k) * out.prefix_l1.back();
    if (threshold >= static_cast<double>(N_probe)) {
      throw ProbeExhausted("greedy schedule level " + std::to_string(k + 1) + " needs N > " +
                           std::to_string(threshold) + ", beyond probe limit " + std::to_string(N_probe));
    }
    std::uint64_t c = std::max(horizons.back(), static_cast<std::uint64_t>(std::floor(threshold))) + 1;
    while (true) {
      if (c > N_probe) {
        throw ProbeExhausted("greedy schedule level " + std::to_string(k + 1) +
                             " found no admissible horizon up to " + std::to_string(N_probe));
      }
      const double sum = advance(c);
      if (sum / static_cast<double>(c) >= floor_mean) break;
      c = next_probe(c);
    }
    horizons.push_back(c);
    out.prefix_l1.push_back(s.value());
  }
  out.schedule = SubsequenceSchedule(std::move(horizons));
  return out;
}

SubsequenceSchedule greedy_schedule(const ComplexSeq& x, std::size_t k_max, std::uint64_t N_probe,
                                    GreedyOptions opts) {
  return greedy_schedule_detail(x, k_max, N_probe, opts).schedule;
}

std::uint64_t cantor_pair(std::uint64_t m, std::uint64_t h) {
  const U128 s = static_cast<U128>(m) + h;
  const U128 v = s * (s + 1) / 2 + h;
  if (v > ~std::uint64_t{0}) throw NumericGuardError("cantor_pair overflows 64 bits");
  return static_cast<std::uint64_t>(v);
}

std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t k) {
  auto w = static_cast<U128>(std::floor((std::sqrt(8.0 * static_cast<double>(k) + 1.0) - 1.0) / 2.0));
  while (w > 0 && triangular(w) > k) --w;
  while (triangular(w + 1) <= k) ++w;
  const auto h = static_cast<std::uint64_t>(k - triangular(w));
  const auto m = static_cast<std::uint64_t>(w - h);
  return {m, h};
}

Complex complex_sign(Complex z) {
  const double r = std::abs(z);
  return r == 0.0 ? Complex{} : z / r;
}

bool AdversarialCompanion::covers(std::uint64_t m, std::uint64_t h) const {
  // pi(m, h) + 1 <= Q, evaluated without overflow.
  const U128 s = static_cast<U128>(m) + h;
  return s * (s + 1) / 2 + h < schedule.size();
}

std::uint64_t AdversarialCompanion::designated_horizon(std::uint64_t m, std::uint64_t h) const {
  if (!covers(m, h)) {
    throw CoverageError("pair (" + std::to_string(m) + ", " + std::to_string(h) + ") is not covered by a " +
                        std::to_string(schedule.size()) + "-level schedule");
  }
  return schedule.at(pairing(m, h) + 1);
}

std::uint64_t AdversarialCompanion::block_start(std::uint64_t m, std::uint64_t h) const {
  (void)designated_horizon(m, h);
  return schedule.at(pairing(m, h));
}

std::pair<std::uint64_t, std::uint64_t> AdversarialCompanion::pair_of(std::uint64_t n) const {
  const auto& hz = schedule.horizons();
  if (n == 0 || hz.empty() || n > hz.back()) {
    throw CoverageError("companion index " + std::to_string(n) + " outside covered range (0, " +
                        std::to_string(hz.empty() ? 0 : hz.back()) + "]");
  }
  const auto q = static_cast<std::uint64_t>(std::lower_bound(hz.begin(), hz.end(), n) - hz.begin());
  return pairing.inverse(q);
}

AdversarialCompanion adversarial_companion(const ComplexSeq& x, const SubsequenceSchedule& sched,
                                           PairingFunction pairing) {
  if (sched.empty()) throw DomainError("adversarial companion needs a nonempty schedule");
  AdversarialCompanion out{ComplexSeq(), sched, pairing};
  auto owner = std::make_shared<const AdversarialCompanion>(out);
  out.y = ComplexSeq(
      [x, owner](std::uint64_t n) {
        const auto [m, h] = owner->pair_of(n);
        (void)m;
        return complex_sign(x(n + h));
      },
      1.0);
  return out;
}

}  // namespace ergolab
