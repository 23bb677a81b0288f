#pragma once

// System-level mixing diagnostics from exact and empirical set correlations.
//
// Verdicts are "consistent with" statements at declared thresholds. Finite
// data never certifies mixing.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ergolab/reduce.hpp"
#include "ergolab/sequences.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

/// (1/N) sum_{n=1}^N |mu(A ∩ T^{-n}B) - mu(A)mu(B)|.
double weak_mixing_defect(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b, std::uint64_t N,
                          Parallelism par = {});

/// max_{h_min <= n <= h_max} |mu(A ∩ T^{-n}B) - mu(A)mu(B)|.
double strong_mixing_defect(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b,
                            std::uint64_t h_min, std::uint64_t h_max, Parallelism par = {});

/// (1/N) sum_{n=1}^N 1_A(T^{n+h}x) 1_B(T^n x) along the system's base orbit.
/// Estimates mu(B ∩ T^{-h}A), i.e. exact_set_correlation(sys, B, A, h).
double empirical_set_correlation(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b,
                                 std::uint64_t h, std::uint64_t N, Parallelism par = {});

/// Eigenfunction obstruction: weak-mixing statistic of f(T^{n+h}x) lambda^{-n}
/// with f = e^{2 pi i x} and lambda = e^{2 pi i alpha} on the first rotation
/// factor, over H = floor(sqrt(N)) lags. Empty when the system has no
/// rotation factor.
std::optional<double> eigenfunction_witness(const MPSystem& sys, std::uint64_t N, Parallelism par = {});

enum class Verdict { consistent_with_weak_mixing, consistent_with_strong_mixing, obstruction_found };

std::string to_string(Verdict v);

struct ClassifyOptions {
  std::uint64_t N = 100000;
  std::uint64_t h_min = 1;
  std::uint64_t h_max = 64;
  /// Number of points in the weak-defect trace (geometric in N).
  std::size_t trace_points = 16;
  /// Defaults to 3/sqrt(N).
  std::optional<double> weak_threshold;
  std::optional<double> strong_threshold;
  /// Twisted self-correlation statistic above this is an obstruction.
  double witness_threshold = 0.5;
};

struct MixingReport {
  std::vector<std::pair<std::uint64_t, double>> weak_defect_trace;
  std::vector<std::pair<std::uint64_t, double>> strong_defect_trace;
  Verdict verdict = Verdict::obstruction_found;
  std::string witness;
  double witness_value = 0.0;
  double weak_threshold = 0.0;
  double strong_threshold = 0.0;
  std::optional<double> eigenfunction_statistic;
};

MixingReport classify_mixing(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b,
                             const ClassifyOptions& opts, Parallelism par = {});

struct ConverseRow {
  std::uint64_t h = 0;
  double empirical = 0.0;
  /// (1/N) sum (1_A(T^{n+h}x) - mu(A)) 1_B(T^n x)
  double centered_correlation = 0.0;
  /// mu(A) (1/N) sum 1_B(T^n x)
  double birkhoff_term = 0.0;
  double residual = 0.0;
  /// |empirical - mu(A)mu(B)|
  double tail_gap = 0.0;
  /// mu(B ∩ T^{-h}A) when the system supports exact correlations.
  std::optional<double> exact;
};

struct ConverseReport {
  std::vector<ConverseRow> rows;
  double max_residual = 0.0;
  double max_tail_gap = 0.0;
  double product_measure = 0.0;
};

/// Checks the decomposition
///   empirical(h) = centered_correlation(h) + birkhoff_term
/// for every h in [h_min, h_max] at horizon N.
ConverseReport converse_reconstruction(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b,
                                       std::uint64_t h_min, std::uint64_t h_max, std::uint64_t N,
                                       Parallelism par = {});

}  // namespace ergolab
