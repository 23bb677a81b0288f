#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "ergolab/canned.hpp"
#include "ergolab/errors.hpp"
#include "ergolab/experiment.hpp"

namespace ergolab {

namespace {

constexpr std::uint64_t kN = 1000000;

template <class... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[200];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

void gate(LemmaReport& rep, bool ok, const std::string& what) {
  rep.lines.push_back(std::string(ok ? "PASS " : "FAIL ") + what);
  rep.pass = rep.pass && ok;
}

LemmaReport example_2_1(Parallelism par) {
  LemmaReport rep{true, {}};
  const ComplexSeq blocks = block_sequence(BlockSpec{kGoldenRotation, exp_observable(1), std::nullopt});
  const double root = std::sqrt(2.0 * static_cast<double>(kN)) - 1.0;
  for (double b : canned::kBetas) {
    const CirclePoint beta = CirclePoint::from_double(b);
    const double bound = 2.0 / (root * std::abs(Complex(1.0) - unit_phasor(-beta))) + 1e-3;
    const double c = std::abs(correlation_at(blocks, ComplexSeq::character(beta), 0, kN, par));
    gate(rep, c <= bound, fmt("beta=%.6f |corr|=%.3e bound=%.3e", b, c, bound));
  }
  return rep;
}

LemmaReport perp_compact(Parallelism par) {
  LemmaReport rep{true, {}};
  const MPSystem sys = canned::fair_bernoulli();
  const ComplexSeq x = orbit_sequence(sys, canned::canonical_observable(sys));
  const ComplexSeq blocks = block_sequence(BlockSpec{kGoldenRotation, exp_observable(1), std::nullopt});
  double worst = 0.0;
  for (std::uint64_t h = 0; h <= 32; ++h) worst = std::max(worst, std::abs(correlation_at(x, blocks, h, kN, par)));
  gate(rep, worst <= 0.02, fmt("max_{h<=32} |corr| = %.3e, gate %.2f", worst, 0.02));
  return rep;
}

LemmaReport adversarial_4_2(Parallelism par) {
  LemmaReport rep{true, {}};
  const MPSystem sys = canned::fair_bernoulli();
  const std::pair<const char*, ComplexSeq> cases[] = {
      {"constant", ComplexSeq::constant(1.0)},
      {"alternating", ComplexSeq::alternating()},
      {"bernoulli", orbit_sequence(sys, canned::sign_observable())},
  };
  for (const auto& [label, x] : cases) {
    const SubsequenceSchedule sched = greedy_schedule(x, 10, std::uint64_t{1} << 23);
    const AdversarialCompanion comp = adversarial_companion(x, sched);
    std::size_t covered = 0, held = 0;
    double min_margin = INFINITY;
    for (std::uint64_t m = 0; m <= 4; ++m) {
      for (std::uint64_t h = 0; h <= 4; ++h) {
        if (!comp.covers(m, h)) continue;
        const AdversarialPairCheck c = check_adversarial_pair(x, comp, m, h, par);
        ++covered;
        held += c.holds ? 1 : 0;
        min_margin = std::min(min_margin, c.margin);
      }
    }
    gate(rep, covered > 0 && held == covered,
         fmt("%s: %zu covered pairs, min margin %.3e", label, covered, min_margin));
  }
  return rep;
}

LemmaReport converse_3_3(Parallelism par) {
  LemmaReport rep{true, {}};
  const MPSystem sys = canned::fair_bernoulli();
  const MeasurableSet a = cylinder_set({0.5, 0.5}, 3, {{0, 0, 0}, {1, 0, 1}, {1, 1, 0}});
  const MeasurableSet b = cylinder_set({0.5, 0.5}, 2, {{0, 1}});
  const std::uint64_t w = 3;
  const ConverseReport r = converse_reconstruction(sys, a, b, 0, 2 * w, kN, par);
  gate(rep, r.max_residual <= 1e-10, fmt("max residual %.3e, gate %.0e", r.max_residual, 1e-10));
  const double clt = 5.0 / std::sqrt(static_cast<double>(kN));
  double tail = 0.0;
  for (const ConverseRow& row : r.rows) {
    if (row.h >= w) tail = std::max(tail, row.tail_gap);
  }
  gate(rep, tail <= clt, fmt("max tail gap %.3e, gate %.3e", tail, clt));
  return rep;
}

LemmaReport eq_26(Parallelism par) {
  LemmaReport rep{true, {}};
  const MPSystem sys = canned::fair_bernoulli();
  const ComplexSeq x = orbit_sequence(sys, canned::canonical_observable(sys));
  const SubsequenceSchedule sched = SubsequenceSchedule::geometric(1000, 1.25, kN);
  const std::size_t w = canned::kWindow;
  const CorrelationProfile prof = correlation_profile(x, ComplexSeq::constant(1.0), sched, 2 * w, {}, par);
  const double stat = strong_mixing_statistic(prof, w, 2 * w);
  double inst = 0.0;
  for (std::size_t h = w; h <= 2 * w; ++h) inst = std::max(inst, prof.instability[h]);
  const double n = static_cast<double>(sched.back());
  const double avg = std::abs(cesaro_average(x, sched.back(), par));
  const double bound = stat + inst + 5.0 / std::sqrt(n);
  gate(rep, avg <= bound, fmt("|cesaro| %.3e <= strong + instability + 5/sqrt(N) = %.3e", avg, bound));
  return rep;
}

}  // namespace

const std::vector<std::string>& lemma_names() {
  static const std::vector<std::string> names = {"example-2-1", "perp-compact", "adversarial-4-2", "converse-3-3",
                                                 "eq-26"};
  return names;
}

LemmaReport verify_lemma(const std::string& name, Parallelism par) {
  if (name == "example-2-1") return example_2_1(par);
  if (name == "perp-compact") return perp_compact(par);
  if (name == "adversarial-4-2") return adversarial_4_2(par);
  if (name == "converse-3-3") return converse_3_3(par);
  if (name == "eq-26") return eq_26(par);
  throw ConfigError("unknown lemma '" + name + "'");
}

}  // namespace ergolab
