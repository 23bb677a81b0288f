#include "ergolab/classify.hpp"

#include <algorithm>
#include <cmath>

#include "ergolab/correlation.hpp"
#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

double defect_term(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b, double product,
                   std::uint64_t n) {
  return std::abs(exact_set_correlation(sys, a, b, n) - product);
}

std::vector<std::uint64_t> trace_horizons(std::uint64_t N, std::size_t points) {
  std::vector<std::uint64_t> out;
  if (points <= 1 || N <= 1) return {N};
  const double ratio = std::pow(static_cast<double>(N), 1.0 / static_cast<double>(points - 1));
  double v = 1.0;
  for (std::size_t k = 0; k < points; ++k, v *= ratio) {
    const auto n = std::min<std::uint64_t>(N, static_cast<std::uint64_t>(std::llround(v)));
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  if (out.back() != N) out.push_back(N);
  return out;
}

}  // namespace

double weak_mixing_defect(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b, std::uint64_t N,
                          Parallelism par) {
  if (N == 0) throw DomainError("weak_mixing_defect: N must be positive");
  const double product = exact_measure(a) * exact_measure(b);
  const double s =
      ordered_sum<double>(1, N, [&](std::uint64_t n) { return defect_term(sys, a, b, product, n); }, par);
  return s / static_cast<double>(N);
}

double strong_mixing_defect(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b,
                            std::uint64_t h_min, std::uint64_t h_max, Parallelism par) {
  if (h_min == 0 || h_min > h_max) throw DomainError("strong_mixing_defect: need 1 <= h_min <= h_max");
  const double product = exact_measure(a) * exact_measure(b);
  const std::uint64_t count = h_max - h_min + 1;
  std::vector<double> terms(count);
  parallel_for(count, par, [&](std::size_t k) { terms[k] = defect_term(sys, a, b, product, h_min + k); });
  return *std::max_element(terms.begin(), terms.end());
}

double empirical_set_correlation(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b,
                                 std::uint64_t h, std::uint64_t N, Parallelism par) {
  const ComplexSeq ia = orbit_sequence(sys, indicator_of(a));
  const ComplexSeq ib = orbit_sequence(sys, indicator_of(b));
  return correlation_at(ia, ib, h, N, par).real();
}

std::optional<double> eigenfunction_witness(const MPSystem& sys, std::uint64_t N, Parallelism par) {
  const Observable f = exp_observable(1);
  const MPSystem* factor = nullptr;
  try {
    factor = &observable_factor(sys, f);
  } catch (const IncompatibleError&) {
    return std::nullopt;
  }
  const auto& rot = std::get<RotationSystem>(factor->kind);
  const ComplexSeq x = orbit_sequence(sys, f);
  const ComplexSeq y = ComplexSeq::character(rot.alpha);
  const SubsequenceSchedule sched({N});
  const std::size_t H = default_lag_count(sched);
  const CorrelationProfile prof = correlation_profile(x, y, sched, H, {}, par);
  return weak_mixing_statistic(prof, H);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent_with_weak_mixing:
      return "consistent-with-weak-mixing";
    case Verdict::consistent_with_strong_mixing:
      return "consistent-with-strong-mixing";
    case Verdict::obstruction_found:
      return "obstruction-found";
  }
  return "unknown";
}

MixingReport classify_mixing(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b,
                             const ClassifyOptions& opts, Parallelism par) {
  if (opts.N == 0) throw DomainError("classify: N must be positive");
  if (opts.h_min == 0 || opts.h_min > opts.h_max) throw DomainError("classify: need 1 <= h_min <= h_max");
  MixingReport rep;
  const double gate = 3.0 / std::sqrt(static_cast<double>(opts.N));
  rep.weak_threshold = opts.weak_threshold.value_or(gate);
  rep.strong_threshold = opts.strong_threshold.value_or(gate);
  const double product = exact_measure(a) * exact_measure(b);

  std::vector<double> terms(opts.N);
  parallel_for((opts.N + kChunkSize - 1) / kChunkSize, par, [&](std::size_t c) {
    const std::uint64_t begin = c * kChunkSize;
    const std::uint64_t end = std::min<std::uint64_t>(opts.N, begin + kChunkSize);
    for (std::uint64_t k = begin; k < end; ++k) terms[k] = defect_term(sys, a, b, product, k + 1);
  });
  const std::vector<std::uint64_t> horizons = trace_horizons(opts.N, opts.trace_points);
  const std::vector<double> sums =
      ordered_prefix_sums<double>(1, horizons, [&](std::uint64_t n) { return terms[n - 1]; });
  for (std::size_t q = 0; q < horizons.size(); ++q) {
    rep.weak_defect_trace.emplace_back(horizons[q], sums[q] / static_cast<double>(horizons[q]));
  }

  double strong = 0.0;
  for (std::uint64_t n = opts.h_min; n <= opts.h_max; ++n) {
    const double v = n <= opts.N ? terms[n - 1] : defect_term(sys, a, b, product, n);
    rep.strong_defect_trace.emplace_back(n, v);
    strong = std::max(strong, v);
  }
  const double weak = rep.weak_defect_trace.back().second;

  rep.eigenfunction_statistic = eigenfunction_witness(sys, opts.N, par);
  if (rep.eigenfunction_statistic && *rep.eigenfunction_statistic > opts.witness_threshold) {
    rep.verdict = Verdict::obstruction_found;
    rep.witness = "eigenfunction_statistic";
    rep.witness_value = *rep.eigenfunction_statistic;
  } else if (strong <= rep.strong_threshold) {
    rep.verdict = Verdict::consistent_with_strong_mixing;
    rep.witness = "strong_mixing_defect";
    rep.witness_value = strong;
  } else if (weak <= rep.weak_threshold) {
    rep.verdict = Verdict::consistent_with_weak_mixing;
    rep.witness = "weak_mixing_defect";
    rep.witness_value = weak;
  } else {
    rep.verdict = Verdict::obstruction_found;
    rep.witness = "weak_mixing_defect";
    rep.witness_value = weak;
  }
  return rep;
}

ConverseReport converse_reconstruction(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b,
                                       std::uint64_t h_min, std::uint64_t h_max, std::uint64_t N,
                                       Parallelism par) {
  if (h_min > h_max) throw DomainError("converse_reconstruction: h_min > h_max");
  if (N == 0) throw DomainError("converse_reconstruction: N must be positive");
  const double mu_a = exact_measure(a);
  const double mu_b = exact_measure(b);
  const Observable ind_a = indicator_of(a);
  const ComplexSeq ia = orbit_sequence(sys, ind_a);
  const ComplexSeq ca = orbit_sequence(sys, centered(sys, ind_a));
  const ComplexSeq ib = orbit_sequence(sys, indicator_of(b));

  ConverseReport rep;
  rep.product_measure = mu_a * mu_b;
  const double birkhoff = mu_a * cesaro_average(ib, N, par).real();
  bool exact_supported = true;
  for (std::uint64_t h = h_min; h <= h_max; ++h) {
    ConverseRow row;
    row.h = h;
    row.empirical = correlation_at(ia, ib, h, N, par).real();
    row.centered_correlation = correlation_at(ca, ib, h, N, par).real();
    row.birkhoff_term = birkhoff;
    row.residual = std::abs(row.empirical - (row.centered_correlation + row.birkhoff_term));
    row.tail_gap = std::abs(row.empirical - rep.product_measure);
    if (exact_supported) {
      try {
        row.exact = exact_set_correlation(sys, b, a, h);
      } catch (const IncompatibleError&) {
        exact_supported = false;
      }
    }
    rep.max_residual = std::max(rep.max_residual, row.residual);
    rep.max_tail_gap = std::max(rep.max_tail_gap, row.tail_gap);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace ergolab
