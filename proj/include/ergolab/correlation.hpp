#pragma once

// Cesaro averages, twisted and polynomial averages, and correlation
// profiles along subsequence schedules.
//
// Every long sum goes through ordered_sum, so results are bit-identical for
// any Parallelism setting.

#include <cstdint>
#include <vector>

#include "ergolab/circle.hpp"
#include "ergolab/complex_seq.hpp"
#include "ergolab/reduce.hpp"
#include "ergolab/sequences.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

/// (1/N) sum_{n=1}^N x_n.
Complex cesaro_average(const ComplexSeq& x, std::uint64_t N, Parallelism par = {});

/// (1/N) sum_{n=1}^N x_{n+h} conj(y_n).
Complex correlation_at(const ComplexSeq& x, const ComplexSeq& y, std::uint64_t h, std::uint64_t N,
                       Parallelism par = {});

/// Estimates of l(h) for h = 0..H.
struct CorrelationProfile {
  /// Value at the largest horizon of the schedule.
  std::vector<Complex> estimate;
  /// Largest deviation of the tail-horizon estimates from `estimate`.
  std::vector<double> instability;
  /// estimate_by_horizon[h][q]: correlation_at(x, y, h, N_q).
  std::vector<std::vector<Complex>> estimate_by_horizon;
  SubsequenceSchedule schedule;
  /// Index of the first horizon counted as tail.
  std::size_t tail_begin = 0;

  std::size_t max_lag() const { return estimate.empty() ? 0 : estimate.size() - 1; }
  /// Running maximum of |l_hat(h)| over the tail horizons.
  double tail_upper_modulus(std::size_t h) const;
};

struct ProfileOptions {
  /// Fraction of horizons, counted from the end, that form the tail.
  double tail_fraction = 0.5;
};

/// Materializes x on [1, N_max + H] and y on [1, N_max], then sums all
/// horizons for each lag in a single pass. Parallel over lags.
CorrelationProfile correlation_profile(const ComplexSeq& x, const ComplexSeq& y,
                                       const SubsequenceSchedule& sched, std::size_t H,
                                       ProfileOptions opts = {}, Parallelism par = {});

/// floor(sqrt(N_max)).
std::size_t default_lag_count(const SubsequenceSchedule& sched);

/// (1/H) sum_{h=1}^H |l_hat(h)|.
double weak_mixing_statistic(const CorrelationProfile& prof, std::size_t H);

/// max_{h_min <= h <= h_max} |l_hat(h)|.
double strong_mixing_statistic(const CorrelationProfile& prof, std::size_t h_min, std::size_t h_max);

/// (1/H) sum_{h=1}^H |l_hat(h^2)|. Requires max_lag() >= H^2.
double squares_cesaro(const CorrelationProfile& prof, std::size_t H);

/// Unimodular lambda = e^{2 pi i angle}.
struct TwistParameter {
  CirclePoint angle;

  Complex value() const { return unit_phasor(angle); }
  /// lambda^n from the exact angle n * angle mod 1.
  Complex power(std::uint64_t n) const { return unit_phasor(angle.scaled(n)); }
};

/// (1/N) sum_{n=1}^N x_n lambda^n.
Complex twisted_average(const ComplexSeq& x, TwistParameter lambda, std::uint64_t N, Parallelism par = {});

/// Integer polynomial sum_k c_k n^k of degree at most 8.
struct IntPolynomial {
  std::vector<std::int64_t> coefficients;  // ascending powers

  /// Throws DomainError for degree > 8.
  explicit IntPolynomial(std::vector<std::int64_t> c);
  /// Exact value; throws NumericGuardError when negative or above 2^64 - 1.
  std::uint64_t index_at(std::uint64_t n) const;
};

/// (1/N) sum_{n=1}^N f(T^{p(n)} x), indexing the orbit directly.
Complex polynomial_average(const MPSystem& sys, const Observable& f, const IntPolynomial& p, std::uint64_t N,
                           Parallelism par = {});

/// Finite lower bound for the companion correlation of one pair (m, h):
///   Re corr(x, y, h, N') >= (1/N') sum_{n<=N'} |x_{n+h}| - 2(S + h B)/N'
/// with N' the pair's designated horizon, S = sum_{n<=N_pi} |x_n| and B the
/// bound of x.
struct AdversarialPairCheck {
  std::uint64_t m = 0;
  std::uint64_t h = 0;
  std::uint64_t horizon = 0;
  Complex realized;
  double shifted_l1_mean = 0.0;
  double lower_bound = 0.0;
  /// Re realized - lower_bound.
  double margin = 0.0;
  bool holds = false;
};

/// Slack allowed for rounding in the bound comparison.
inline constexpr double kAdversarialSlack = 1e-12;

AdversarialPairCheck check_adversarial_pair(const ComplexSeq& x, const AdversarialCompanion& comp,
                                            std::uint64_t m, std::uint64_t h, Parallelism par = {});

}  // namespace ergolab
