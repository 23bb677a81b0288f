#pragma once

// Explicit sequence constructions and the Besicovitch / compactness
// statistics.

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ergolab/circle.hpp"
#include "ergolab/complex_seq.hpp"
#include "ergolab/reduce.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

/// Finite sum of c_j e^{2 pi i n beta_j}.
struct TrigPolynomial {
  struct Component {
    CirclePoint frequency;
    Complex coefficient;
  };
  std::vector<Component> terms;
};

/// Each n * beta_j is reduced mod 1 in fixed point before exponentiating.
Complex trig_poly_eval(const TrigPolynomial& p, std::uint64_t n);
ComplexSeq as_sequence(const TrigPolynomial& p);

/// The unique m >= 1 with m(m-1)/2 < n <= m(m+1)/2. Requires n >= 1.
std::uint64_t block_index(std::uint64_t n);

/// Block structure k_1 = 0 < k_2 < ... with block m = (k_m, k_{m+1}],
/// carrying the point u_m.
struct GeneralizedBlocks {
  std::function<CirclePoint(std::uint64_t m)> points;
  std::function<std::uint64_t(std::uint64_t m)> gaps;
};

/// Block sequence f(x_n): by default x_n = m alpha on the m-th block of
/// length m; with `generalized` set, x_n = u_m on (k_m, k_{m+1}].
struct BlockSpec {
  CirclePoint alpha;
  Observable f = exp_observable(1);
  std::optional<GeneralizedBlocks> generalized;
};

/// k_m = floor((m - 1)^exponent), exponent >= 1.
std::function<std::uint64_t(std::uint64_t)> power_gaps(double exponent);
/// u_m = m beta + offset.
std::function<CirclePoint(std::uint64_t)> rotation_points(CirclePoint beta, CirclePoint offset = {});
/// Base-2 van der Corput sequence, u_m = bit-reversal of m.
std::function<CirclePoint(std::uint64_t)> van_der_corput_points();

/// Block number of n under a generalized gap sequence.
std::uint64_t generalized_block_index(const GeneralizedBlocks& g, std::uint64_t n);

Complex block_sequence(const BlockSpec& spec, std::uint64_t n);
ComplexSeq block_sequence(const BlockSpec& spec);

/// (1/N) sum_{n=1}^N |x_n - P(n)|.
double besicovitch_distance(const ComplexSeq& x, const TrigPolynomial& p, std::uint64_t N,
                            Parallelism par = {});

/// max_{1<=m<=M} min_{1<=k<=K} (1/N) sum_{n=1}^N |x_{n+m} - x_{n+k}|^2.
/// Truncating the sup to m <= M makes this a lower bound on the
/// untruncated quantity. Requires 1 <= K <= M.
double compactness_statistic(const ComplexSeq& x, std::uint64_t K, std::uint64_t M, std::uint64_t N,
                             Parallelism par = {});

/// Strictly increasing horizons N_1 < N_2 < ... along which Cesaro limits
/// are estimated.
class SubsequenceSchedule {
 public:
  SubsequenceSchedule() = default;
  /// Throws DomainError unless horizons are positive and strictly increasing.
  explicit SubsequenceSchedule(std::vector<std::uint64_t> horizons);

  static SubsequenceSchedule arithmetic(std::uint64_t start, std::uint64_t step, std::size_t count);
  /// start, then ceil(previous * ratio) (at least previous + 1) up to max.
  static SubsequenceSchedule geometric(std::uint64_t start, double ratio, std::uint64_t max);

  const std::vector<std::uint64_t>& horizons() const { return horizons_; }
  std::size_t size() const { return horizons_.size(); }
  bool empty() const { return horizons_.empty(); }
  std::uint64_t back() const { return horizons_.back(); }
  /// 1-based: at(1) = N_1. at(0) = 0 by convention.
  std::uint64_t at(std::size_t q) const { return q == 0 ? 0 : horizons_.at(q - 1); }

 private:
  std::vector<std::uint64_t> horizons_;
};

struct GreedyOptions {
  /// Growth ratio of the probe grid used when a candidate horizon fails the
  /// running-average test.
  double ratio = 1.1;
  /// A horizon qualifies when its running mean of |x_n| is at least
  /// (1 - tolerance) times the probed upper mean.
  double tolerance = 0.05;
};

struct GreedyResult {
  SubsequenceSchedule schedule;
  /// Probed estimate of limsup (1/N) sum |x_n|.
  double upper_mean = 0.0;
  /// sum_{n <= N_k} |x_n| for each horizon.
  std::vector<double> prefix_l1;
};

/// Builds N_1 < ... < N_{k_max} with sum_{n <= N_k} |x_n| < N_{k+1} / k.
/// Each N_{k+1} is the smallest admissible integer above
/// max(N_k, k * sum_{n <= N_k} |x_n|), advanced along the probe grid when
/// its running mean falls short of the upper-mean estimate.
/// Throws ProbeExhausted when a level would exceed N_probe.
GreedyResult greedy_schedule_detail(const ComplexSeq& x, std::size_t k_max, std::uint64_t N_probe,
                                    GreedyOptions opts = {});
SubsequenceSchedule greedy_schedule(const ComplexSeq& x, std::size_t k_max, std::uint64_t N_probe,
                                    GreedyOptions opts = {});

/// (m + h)(m + h + 1)/2 + h. Throws NumericGuardError on overflow.
std::uint64_t cantor_pair(std::uint64_t m, std::uint64_t h);
std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t k);

struct PairingFunction {
  std::uint64_t operator()(std::uint64_t m, std::uint64_t h) const { return cantor_pair(m, h); }
  std::pair<std::uint64_t, std::uint64_t> inverse(std::uint64_t k) const { return cantor_unpair(k); }
};

/// z/|z|, and 0 at 0.
Complex complex_sign(Complex z);

/// Companion y with y_n = sgn(x_{n+h}) for N_{pi(m,h)} < n <= N_{pi(m,h)+1}.
struct AdversarialCompanion {
  ComplexSeq y;
  SubsequenceSchedule schedule;
  PairingFunction pairing;

  /// Whether the block of pair (m, h) ends inside the schedule.
  bool covers(std::uint64_t m, std::uint64_t h) const;
  /// N_{pi(m,h)+1}; throws CoverageError when not covered.
  std::uint64_t designated_horizon(std::uint64_t m, std::uint64_t h) const;
  /// N_{pi(m,h)}, the start of the pair's block.
  std::uint64_t block_start(std::uint64_t m, std::uint64_t h) const;
  /// (m, h) owning index n; throws CoverageError outside the covered range.
  std::pair<std::uint64_t, std::uint64_t> pair_of(std::uint64_t n) const;
};

/// Indices outside (0, N_last] throw CoverageError when queried.
AdversarialCompanion adversarial_companion(const ComplexSeq& x, const SubsequenceSchedule& sched,
                                           PairingFunction pairing = {});

}  // namespace ergolab
