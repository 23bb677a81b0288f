#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ergolab/classify.hpp"
#include "ergolab/errors.hpp"

using namespace ergolab;

namespace {

const std::vector<double> kProbs = {0.3, 0.7};

}  // namespace

TEST_CASE("rotation weak-mixing defect follows the overlap formula", "[classify]") {
  const MPSystem rot = make_rotation(kGoldenRotation);
  const MeasurableSet half = circle_set_from_bounds({{0.0, 0.5}});
  const std::uint64_t N = 100000;
  long double s = 0.0L;
  for (std::uint64_t n = 1; n <= N; ++n) {
    const long double t = std::abs(kGoldenRotation.scaled(n).centered());
    s += std::abs(0.25L - t);
  }
  CHECK(weak_mixing_defect(rot, half, half, N) == Catch::Approx(static_cast<double>(s / N)).margin(1e-12));
  // Equidistribution of n alpha gives the mean of |1/4 - t| over t uniform on [0, 1/2].
  CHECK(std::abs(weak_mixing_defect(rot, half, half, N) - 0.125) < 1e-3);
}

TEST_CASE("Bernoulli defects vanish once windows separate", "[classify]") {
  const MPSystem sys = make_bernoulli(kProbs);
  const MeasurableSet a = cylinder_set(kProbs, 3, {{0, 1, 1}, {1, 0, 0}});
  const MeasurableSet b = cylinder_set(kProbs, 2, {{1, 1}});
  CHECK(strong_mixing_defect(sys, a, b, 3, 12) == 0.0);
  CHECK(strong_mixing_defect(sys, a, b, 1, 12) > 0.0);
  CHECK(weak_mixing_defect(sys, a, b, 100000) < 1e-4);
  CHECK(weak_mixing_defect(sys, a, b, 100, Parallelism{4}) == weak_mixing_defect(sys, a, b, 100));
}

TEST_CASE("empirical correlation estimates mu(B and T^-h A)", "[classify]") {
  const MPSystem sys = make_bernoulli(kProbs, 31);
  const MeasurableSet a = cylinder_set(kProbs, 2, {{0, 1}});
  const MeasurableSet b = cylinder_set(kProbs, 2, {{1, 0}});
  const std::uint64_t N = 200000;
  const double clt = 5.0 / std::sqrt(static_cast<double>(N));
  for (std::uint64_t h = 0; h <= 4; ++h) {
    CHECK(std::abs(empirical_set_correlation(sys, a, b, h, N) - exact_set_correlation(sys, b, a, h)) <= clt);
  }
  // The two orderings differ at h = 1: 0.7*0.3*0.7 against 0.3*0.7*0.3.
  CHECK(exact_set_correlation(sys, b, a, 1) == Catch::Approx(0.147));
  CHECK(exact_set_correlation(sys, a, b, 1) == Catch::Approx(0.063));
  CHECK(std::abs(empirical_set_correlation(sys, a, b, 1, N) - 0.063) > 3 * clt);
}

TEST_CASE("converse decomposition is exact up to rounding", "[classify]") {
  const MPSystem sys = make_bernoulli(kProbs, 8);
  const MeasurableSet a = cylinder_set(kProbs, 3, {{0, 0, 0}, {1, 0, 1}});
  const MeasurableSet b = cylinder_set(kProbs, 1, {{1}});
  const std::uint64_t N = 100000;
  const ConverseReport r = converse_reconstruction(sys, a, b, 0, 8, N);
  REQUIRE(r.rows.size() == 9);
  CHECK(r.max_residual <= 1e-12);
  CHECK(r.product_measure == Catch::Approx(exact_measure(a) * exact_measure(b)));
  for (const ConverseRow& row : r.rows) {
    CHECK(row.residual == Catch::Approx(std::abs(row.empirical - row.centered_correlation - row.birkhoff_term)).margin(1e-15));
    CHECK(row.tail_gap == std::abs(row.empirical - r.product_measure));
    REQUIRE(row.exact.has_value());
    CHECK(*row.exact == exact_set_correlation(sys, b, a, row.h));
    CHECK(std::abs(row.empirical - *row.exact) <= 5.0 / std::sqrt(static_cast<double>(N)));
  }
  CHECK_THROWS_AS(converse_reconstruction(sys, a, b, 3, 2, N), DomainError);
}

TEST_CASE("eigenfunction witness", "[classify]") {
  const auto w = eigenfunction_witness(make_rotation(kGoldenRotation), 10000);
  REQUIRE(w.has_value());
  CHECK(*w >= 0.99);
  CHECK_FALSE(eigenfunction_witness(make_bernoulli(kProbs), 10000).has_value());
  const auto p = eigenfunction_witness(make_product(make_bernoulli(kProbs), make_rotation(kGoldenRotation)), 10000);
  REQUIRE(p.has_value());
  CHECK(*p >= 0.99);
}

TEST_CASE("verdicts", "[classify]") {
  const MPSystem ber = make_bernoulli(kProbs);
  const MeasurableSet a = cylinder_set(kProbs, 3, {{0, 1, 1}});
  const MeasurableSet b = cylinder_set(kProbs, 2, {{1, 0}});

  ClassifyOptions strong;
  strong.N = 20000;
  strong.h_min = 3;
  strong.h_max = 40;
  const MixingReport s = classify_mixing(ber, a, b, strong);
  CHECK(s.verdict == Verdict::consistent_with_strong_mixing);
  CHECK(s.witness_value == 0.0);
  CHECK(s.strong_defect_trace.size() == 38);
  CHECK(s.weak_defect_trace.back().first == 20000);
  CHECK(s.weak_threshold == Catch::Approx(3.0 / std::sqrt(20000.0)));

  ClassifyOptions weak = strong;
  weak.h_min = 1;
  const MixingReport w = classify_mixing(ber, a, b, weak);
  CHECK(w.verdict == Verdict::consistent_with_weak_mixing);
  CHECK(w.witness == "weak_mixing_defect");

  const MPSystem rot = make_rotation(kGoldenRotation);
  const MeasurableSet half = circle_set_from_bounds({{0.0, 0.5}});
  const MixingReport r = classify_mixing(rot, half, half, strong);
  CHECK(r.verdict == Verdict::obstruction_found);
  CHECK(r.witness == "eigenfunction_statistic");

  ClassifyOptions blind = strong;
  blind.witness_threshold = 2.0;
  const MixingReport rb = classify_mixing(rot, half, half, blind);
  CHECK(rb.verdict == Verdict::obstruction_found);
  CHECK(rb.witness == "weak_mixing_defect");
  CHECK(rb.witness_value > 0.1);

  CHECK(to_string(Verdict::consistent_with_weak_mixing) == "consistent-with-weak-mixing");
  CHECK(to_string(Verdict::consistent_with_strong_mixing) == "consistent-with-strong-mixing");
  CHECK(to_string(Verdict::obstruction_found) == "obstruction-found");

  ClassifyOptions bad = strong;
  bad.h_min = 0;
  CHECK_THROWS_AS(classify_mixing(ber, a, b, bad), DomainError);
}
