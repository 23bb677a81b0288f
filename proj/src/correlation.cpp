#include "ergolab/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

// a * conj(b), spelled out so no library multiply is involved.
inline Complex mul_conj(Complex a, Complex b) {
  return {a.real() * b.real() + a.imag() * b.imag(), a.imag() * b.real() - a.real() * b.imag()};
}

inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline Complex scale(Complex z, double d) { return {z.real() / d, z.imag() / d}; }

void require_positive(std::uint64_t N, const char* what) {
  if (N == 0) throw DomainError(std::string(what) + ": N must be positive");
}

}  // namespace

Complex cesaro_average(const ComplexSeq& x, std::uint64_t N, Parallelism par) {
  require_positive(N, "cesaro_average");
  const Complex s = ordered_sum<Complex>(1, N, [&](std::uint64_t n) { return x(n); }, par);
  return scale(s, static_cast<double>(N));
}

Complex correlation_at(const ComplexSeq& x, const ComplexSeq& y, std::uint64_t h, std::uint64_t N,
                       Parallelism par) {
  require_positive(N, "correlation_at");
  const Complex s =
      ordered_sum<Complex>(1, N, [&](std::uint64_t n) { return mul_conj(x(n + h), y(n)); }, par);
  return scale(s, static_cast<double>(N));
}

double CorrelationProfile::tail_upper_modulus(std::size_t h) const {
  const auto& row = estimate_by_horizon.at(h);
  double best = 0.0;
  for (std::size_t q = tail_begin; q < row.size(); ++q) best = std::max(best, std::abs(row[q]));
  return best;
}

CorrelationProfile correlation_profile(const ComplexSeq& x, const ComplexSeq& y,
                                       const SubsequenceSchedule& sched, std::size_t H,
                                       ProfileOptions opts, Parallelism par) {
  if (sched.empty()) throw DomainError("correlation_profile: empty schedule");
  if (!(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0)) {
    throw DomainError("correlation_profile: tail fraction must lie in (0, 1]");
  }
  const std::uint64_t n_max = sched.back();
  const std::vector<Complex> xs = x.materialize(1, n_max + H, par);
  const std::vector<Complex> ys = y.materialize(1, n_max, par);
  const std::span<const std::uint64_t> counts(sched.horizons());

  CorrelationProfile prof;
  prof.schedule = sched;
  const std::size_t Q = sched.size();
  const auto tail_count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(opts.tail_fraction * Q)));
  prof.tail_begin = Q - std::min(Q, tail_count);
  prof.estimate.resize(H + 1);
  prof.instability.resize(H + 1);
  prof.estimate_by_horizon.resize(H + 1);

  parallel_for(H + 1, par, [&](std::size_t h) {
    std::vector<Complex> sums = ordered_prefix_sums<Complex>(
        1, counts, [&](std::uint64_t n) { return mul_conj(xs[n - 1 + h], ys[n - 1]); });
    for (std::size_t q = 0; q < Q; ++q) sums[q] = scale(sums[q], static_cast<double>(counts[q]));
    const Complex last = sums.back();
    double dev = 0.0;
    for (std::size_t q = prof.tail_begin; q < Q; ++q) dev = std::max(dev, std::abs(sums[q] - last));
    prof.estimate[h] = last;
    prof.instability[h] = dev;
    prof.estimate_by_horizon[h] = std::move(sums);
  });
  return prof;
}

std::size_t default_lag_count(const SubsequenceSchedule& sched) {
  if (sched.empty()) throw DomainError("default_lag_count: empty schedule");
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(sched.back())));
  while (r * r > sched.back()) --r;
  while ((r + 1) * (r + 1) <= sched.back()) ++r;
  return std::max<std::size_t>(1, r);
}

double weak_mixing_statistic(const CorrelationProfile& prof, std::size_t H) {
  if (H == 0 || H > prof.max_lag()) {
    throw DomainError("weak_mixing_statistic: H outside profile range");
  }
  CompensatedSum<double> acc;
  for (std::size_t h = 1; h <= H; ++h) acc.add(std::abs(prof.estimate[h]));
  return acc.value() / static_cast<double>(H);
}

double strong_mixing_statistic(const CorrelationProfile& prof, std::size_t h_min, std::size_t h_max) {
  if (h_min == 0 || h_min > h_max || h_max > prof.max_lag()) {
    throw DomainError("strong_mixing_statistic: lag window outside profile range");
  }
  double best = 0.0;
  for (std::size_t h = h_min; h <= h_max; ++h) best = std::max(best, std::abs(prof.estimate[h]));
  return best;
}

double squares_cesaro(const CorrelationProfile& prof, std::size_t H) {
  if (H == 0) throw DomainError("squares_cesaro: H must be positive");
  if (H * H > prof.max_lag()) {
    throw DomainError("squares_cesaro: profile covers lags up to " + std::to_string(prof.max_lag()) +
                      ", need " + std::to_string(H * H));
  }
  CompensatedSum<double> acc;
  for (std::size_t h = 1; h <= H; ++h) acc.add(std::abs(prof.estimate[h * h]));
  return acc.value() / static_cast<double>(H);
}

Complex twisted_average(const ComplexSeq& x, TwistParameter lambda, std::uint64_t N, Parallelism par) {
  require_positive(N, "twisted_average");
  const Complex s =
      ordered_sum<Complex>(1, N, [&](std::uint64_t n) { return mul(x(n), lambda.power(n)); }, par);
  return scale(s, static_cast<double>(N));
}

IntPolynomial::IntPolynomial(std::vector<std::int64_t> c) : coefficients(std::move(c)) {
  while (coefficients.size() > 1 && coefficients.back() == 0) coefficients.pop_back();
  if (coefficients.empty()) coefficients.push_back(0);
  if (coefficients.size() > 9) throw DomainError("IntPolynomial: degree exceeds 8");
}

std::uint64_t IntPolynomial::index_at(std::uint64_t n) const {
  __int128 acc = 0;
  const auto nn = static_cast<__int128>(n);
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
    if (__builtin_mul_overflow(acc, nn, &acc) || __builtin_add_overflow(acc, static_cast<__int128>(*it), &acc)) {
      throw NumericGuardError("polynomial index overflows at n = " + std::to_string(n));
    }
  }
  if (acc < 0) throw NumericGuardError("polynomial index negative at n = " + std::to_string(n));
  if (acc > static_cast<__int128>(~std::uint64_t{0})) {
    throw NumericGuardError("polynomial index exceeds 64 bits at n = " + std::to_string(n));
  }
  return static_cast<std::uint64_t>(acc);
}

Complex polynomial_average(const MPSystem& sys, const Observable& f, const IntPolynomial& p, std::uint64_t N,
                           Parallelism par) {
  require_positive(N, "polynomial_average");
  const ComplexSeq orbit = orbit_sequence(sys, f);
  const Complex s =
      ordered_sum<Complex>(1, N, [&](std::uint64_t n) { return orbit(p.index_at(n)); }, par);
  return scale(s, static_cast<double>(N));
}

AdversarialPairCheck check_adversarial_pair(const ComplexSeq& x, const AdversarialCompanion& comp,
                                            std::uint64_t m, std::uint64_t h, Parallelism par) {
  AdversarialPairCheck c;
  c.m = m;
  c.h = h;
  c.horizon = comp.designated_horizon(m, h);
  const std::uint64_t start = comp.block_start(m, h);
  const double n = static_cast<double>(c.horizon);
  c.realized = correlation_at(x, comp.y, h, c.horizon, par);
  c.shifted_l1_mean =
      ordered_sum<double>(1, c.horizon, [&](std::uint64_t k) { return std::abs(x(k + h)); }, par) / n;
  const double head =
      start == 0 ? 0.0 : ordered_sum<double>(1, start, [&](std::uint64_t k) { return std::abs(x(k)); }, par);
  c.lower_bound = c.shifted_l1_mean - 2.0 * (head + static_cast<double>(h) * x.bound()) / n;
  c.margin = c.realized.real() - c.lower_bound;
  c.holds = c.margin >= -kAdversarialSlack;
  return c;
}

}  // namespace ergolab
