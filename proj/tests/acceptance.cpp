// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 all criteria
//   acceptance --criterion 7   a single criterion

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ergolab/canned.hpp"
#include "ergolab/classify.hpp"
#include "ergolab/correlation.hpp"
#include "ergolab/errors.hpp"
#include "ergolab/sequences.hpp"

using namespace ergolab;

namespace {

constexpr std::uint64_t kN = 1000000;
const double kClt = 5.0 / std::sqrt(static_cast<double>(kN));
constexpr long double kTwoPi = 6.283185307179586476925286766559L;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  /// Every computed quantity, compared bitwise across thread counts.
  std::vector<double> fingerprint;

  void gate(bool ok, const std::string& note) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + note);
  }
  void info(const std::string& note) { notes.push_back("     " + note); }
  void record(double v) { fingerprint.push_back(v); }
  void record(Complex z) {
    fingerprint.push_back(z.real());
    fingerprint.push_back(z.imag());
  }
};

template <class... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

ComplexSeq golden_blocks() { return block_sequence(BlockSpec{kGoldenRotation, exp_observable(1), std::nullopt}); }

/// Geometric horizons from 1000 by `ratio`, closed off at N.
SubsequenceSchedule horizons_to(std::uint64_t N, double ratio) {
  std::vector<std::uint64_t> hz = SubsequenceSchedule::geometric(1000, ratio, N).horizons();
  if (hz.back() != N) hz.push_back(N);
  return SubsequenceSchedule(std::move(hz));
}

ComplexSeq canonical_orbit() {
  const MPSystem sys = canned::fair_bernoulli();
  return orbit_sequence(sys, canned::canonical_observable(sys));
}

Outcome eigenfunction(Parallelism par) {
  Outcome o;
  const CirclePoint x0 = CirclePoint::from_double(0.3);
  const MPSystem rot = make_rotation(kGoldenRotation, x0);
  const ComplexSeq x = orbit_sequence(rot, exp_observable(1));
  const long double t = kTwoPi * 0.3L;
  const std::complex<long double> expected(std::cos(t), std::sin(t));
  for (std::uint64_t N : {std::uint64_t{1000}, kN}) {
    const Complex got = twisted_average(x, {-kGoldenRotation}, N, par);
    const double err = static_cast<double>(std::abs(std::complex<long double>(got) - expected));
    o.record(got);
    o.gate(err <= 1e-12, fmt("N=%llu |twisted - e^{2 pi i x0}| = %.3e <= 1e-12", (unsigned long long)N, err));
  }
  const SubsequenceSchedule sched = horizons_to(kN, 2.0);
  const CorrelationProfile prof =
      correlation_profile(x, ComplexSeq::character(kGoldenRotation), sched, 32, {}, par);
  const double w = weak_mixing_statistic(prof, 32);
  o.record(w);
  o.gate(w >= 0.99, fmt("twisted self-profile weak statistic %.15f >= 0.99", w));
  return o;
}

Outcome wiener_wintner(Parallelism par) {
  Outcome o;
  const ComplexSeq x = canonical_orbit();
  for (double t : canned::kTwists) {
    const Complex z = twisted_average(x, {CirclePoint::from_double(t)}, kN, par);
    o.record(z);
    o.gate(std::abs(z) <= 1e-2, fmt("lambda=e^{2 pi i %.6f}: |twisted| = %.3e <= 1e-2", t, std::abs(z)));
  }
  return o;
}

Outcome birkhoff(Parallelism par) {
  Outcome o;
  const std::uint64_t N = std::uint64_t{1} << 20;
  const ComplexSeq x = canonical_orbit();
  const Complex avg = cesaro_average(x, N, par);
  std::complex<long double> direct = 0.0L;
  for (std::uint64_t n = 1; n <= N; ++n) direct += std::complex<long double>(x(n));
  direct /= static_cast<long double>(N);
  const double gap = static_cast<double>(std::abs(std::complex<long double>(avg) - direct));
  const double bound = 5.0 / std::sqrt(static_cast<double>(N));
  o.record(avg);
  o.gate(std::abs(avg) <= bound, fmt("|cesaro| = %.3e <= 5/sqrt(N) = %.3e", std::abs(avg), bound));
  o.gate(gap <= 1e-12, fmt("direct summation differs by %.3e <= 1e-12", gap));
  return o;
}

Outcome block_bound(Parallelism par) {
  Outcome o;
  const ComplexSeq blocks = golden_blocks();
  const double root = std::sqrt(2.0 * static_cast<double>(kN)) - 1.0;
  for (double b : canned::kBetas) {
    const CirclePoint beta = CirclePoint::from_double(b);
    const double bound = 2.0 / (root * std::abs(Complex(1.0) - unit_phasor(-beta))) + 1e-3;
    const Complex c = correlation_at(blocks, ComplexSeq::character(beta), 0, kN, par);
    o.record(c);
    o.gate(std::abs(c) <= bound, fmt("beta=%.6f |corr| = %.3e <= %.3e", b, std::abs(c), bound));
  }
  return o;
}

Outcome compactness(Parallelism par) {
  Outcome o;
  const double stat = compactness_statistic(golden_blocks(), 3, 10, kN, par);
  const double bound = 16.0 * std::sqrt(2.0 * static_cast<double>(kN + 10)) / static_cast<double>(kN) + 1e-6;
  o.record(stat);
  o.gate(stat <= bound, fmt("block sequence K=3 M=10: %.6e <= 16 sqrt(2(N+10))/N + 1e-6 = %.6e", stat, bound));
  for (std::uint64_t m = 4; m <= 10; ++m) {
    const double s = compactness_statistic(golden_blocks(), 3, m, kN, par);
    o.record(s);
    o.info(fmt("sup over m <= %llu: %.6e", (unsigned long long)m, s));
  }
  const double c = compactness_statistic(ComplexSeq::constant({0.6, -0.8}), 3, 10, kN, par);
  const double a = compactness_statistic(ComplexSeq::alternating(), 3, 10, kN, par);
  static const Complex cycle[3] = {{1.0, 0.0}, {-0.5, 2.0}, {0.0, -1.0}};
  const ComplexSeq period3([](std::uint64_t n) { return cycle[n % 3]; }, 2.1);
  const double p = compactness_statistic(period3, 3, 10, kN, par);
  o.record(c);
  o.record(a);
  o.record(p);
  o.gate(c == 0.0, fmt("constant: %.3e == 0", c));
  o.gate(a == 0.0, fmt("(-1)^n: %.3e == 0", a));
  o.gate(p == 0.0, fmt("period 3: %.3e == 0", p));
  return o;
}

Outcome perp_compact(Parallelism par) {
  Outcome o;
  const ComplexSeq x = canonical_orbit();
  const ComplexSeq blocks = golden_blocks();
  double worst = 0.0;
  for (std::uint64_t h = 0; h <= 32; ++h) {
    const Complex c = correlation_at(x, blocks, h, kN, par);
    o.record(c);
    worst = std::max(worst, std::abs(c));
  }
  o.gate(worst <= 0.02, fmt("max_{h<=32} |corr| = %.3e <= 0.02", worst));
  return o;
}

Outcome defects(Parallelism par) {
  Outcome o;
  const MPSystem rot = make_rotation(kGoldenRotation);
  const MeasurableSet half = circle_set_from_bounds({{0.0, 0.5}});
  const double weak = weak_mixing_defect(rot, half, half, kN, par);
  o.record(weak);
  o.gate(std::abs(weak - 0.125) <= 1e-3, fmt("rotation weak defect %.6f = 0.125 +- 1e-3", weak));

  const std::vector<double> probs = {0.5, 0.5};
  const MPSystem ber = canned::fair_bernoulli();
  const std::uint32_t w = canned::kWindow;
  const MeasurableSet a = cylinder_set(probs, w, {{0, 1, 1, 0, 1, 0}, {1, 1, 1, 0, 0, 0}, {0, 0, 0, 0, 0, 1}});
  const MeasurableSet b = cylinder_set(probs, w, {{1, 0, 1, 1, 0, 0}, {0, 1, 0, 0, 1, 1}});
  const double strong = strong_mixing_defect(ber, a, b, w, 4 * w, par);
  o.record(strong);
  o.gate(strong == 0.0, fmt("Bernoulli strong defect over h in [%u, %u] = %.3e == 0", w, 4 * w, strong));
  return o;
}

Outcome strong_tail(Parallelism par) {
  Outcome o;
  const ComplexSeq x = canonical_orbit();
  const std::size_t w = canned::kWindow;
  const SubsequenceSchedule sched = horizons_to(kN, 1.5);
  const std::pair<const char*, ComplexSeq> tests[] = {
      {"constant 1", ComplexSeq::constant(1.0)},
      {"golden blocks", golden_blocks()},
      {"e^{2 pi i n golden}", ComplexSeq::character(kGoldenRotation)},
  };
  const double bound = 5.0 / std::sqrt(static_cast<double>(sched.back()));
  for (const auto& [label, y] : tests) {
    const CorrelationProfile prof = correlation_profile(x, y, sched, 2 * w, {}, par);
    const double s = strong_mixing_statistic(prof, w, 2 * w);
    o.record(s);
    o.gate(s <= bound, fmt("%s: strong statistic over [%zu, %zu] = %.3e <= %.3e", label, w, 2 * w, s, bound));
  }
  return o;
}

Outcome adversarial(Parallelism par) {
  Outcome o;
  const MPSystem sys = canned::fair_bernoulli();
  const std::uint64_t levels = cantor_pair(4, 4) + 1;
  const std::uint64_t probe = std::uint64_t{1} << 24;
  const std::pair<const char*, ComplexSeq> cases[] = {
      {"constant", ComplexSeq::constant(1.0)},
      {"alternating", ComplexSeq::alternating()},
      {"bernoulli", orbit_sequence(sys, canned::sign_observable())},
  };
  for (const auto& [label, x] : cases) {
    const bool ratio_gate = std::string(label) != "bernoulli";
    SubsequenceSchedule sched;
    try {
      sched = greedy_schedule(x, levels, probe, {});
      o.gate(true, fmt("%s: greedy schedule reaches %llu levels", label, (unsigned long long)levels));
    } catch (const ProbeExhausted& e) {
      o.gate(false, fmt("%s: covering m,h <= 4 needs %llu levels: %s", label, (unsigned long long)levels, e.what()));
      // Largest schedule the probe budget allows, for the pairs it does cover.
      std::size_t lo = 1, hi = levels - 1;
      while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        try {
          (void)greedy_schedule(x, mid, probe, {});
          lo = mid;
        } catch (const ProbeExhausted&) {
          hi = mid - 1;
        }
      }
      const std::size_t k = lo;
      sched = greedy_schedule(x, k, probe, {});
      o.info(fmt("%s: %zu levels fit under N_probe = 2^24, N_last = %llu", label, k,
                 (unsigned long long)sched.back()));
    }
    const AdversarialCompanion comp = adversarial_companion(x, sched);
    for (std::uint64_t m = 0; m <= 4; ++m) {
      for (std::uint64_t h = 0; h <= 4; ++h) {
        if (!comp.covers(m, h)) continue;
        const AdversarialPairCheck c = check_adversarial_pair(x, comp, m, h, par);
        o.record(c.realized);
        o.record(c.margin);
        o.gate(c.holds, fmt("%s (m=%llu,h=%llu): Re corr %.6f >= lower bound %.6f", label,
                            (unsigned long long)m, (unsigned long long)h, c.realized.real(), c.lower_bound));
        if (ratio_gate) {
          const double l1 = c.shifted_l1_mean;
          o.gate(c.realized.real() >= 0.9 * l1,
                 fmt("%s (m=%llu,h=%llu): Re corr %.6f >= 0.9 * L1 %.6f", label, (unsigned long long)m,
                     (unsigned long long)h, c.realized.real(), 0.9 * l1));
        }
      }
    }
  }
  return o;
}

Outcome converse(Parallelism par) {
  Outcome o;
  const MPSystem sys = canned::fair_bernoulli();
  const std::vector<double> probs = {0.5, 0.5};
  struct Pair {
    MeasurableSet a, b;
    std::uint64_t window;  // max(w_A, w_B)
  };
  const Pair pairs[] = {
      {cylinder_set(probs, 3, {{0, 0, 0}, {1, 0, 1}, {1, 1, 0}}), cylinder_set(probs, 2, {{0, 1}}), 3},
      {cylinder_set(probs, 2, {{1, 1}}), cylinder_set(probs, 4, {{0, 1, 1, 0}, {1, 1, 1, 1}}), 4},
  };
  for (const Pair& p : pairs) {
    const ConverseReport r = converse_reconstruction(sys, p.a, p.b, 0, 2 * p.window + 2, kN, par);
    o.record(r.max_residual);
    o.gate(r.max_residual <= 1e-10, fmt("window %llu: max residual %.3e <= 1e-10", (unsigned long long)p.window,
                                        r.max_residual));
    double tail = 0.0;
    for (const ConverseRow& row : r.rows) {
      o.record(row.empirical);
      if (row.h >= p.window) tail = std::max(tail, row.tail_gap);
    }
    o.gate(tail <= kClt, fmt("window %llu: max tail |emp - mu(A)mu(B)| %.3e <= %.3e", (unsigned long long)p.window,
                             tail, kClt));
  }
  return o;
}

Outcome estimator_form(Parallelism par) {
  Outcome o;
  const ComplexSeq x = canonical_orbit();
  const SubsequenceSchedule sched = horizons_to(kN, 1.25);
  const std::size_t w = canned::kWindow;
  const CorrelationProfile prof = correlation_profile(x, ComplexSeq::constant(1.0), sched, 2 * w, {}, par);
  const double stat = strong_mixing_statistic(prof, w, 2 * w);
  double inst = 0.0;
  for (std::size_t h = w; h <= 2 * w; ++h) inst = std::max(inst, prof.instability[h]);
  const double n = static_cast<double>(sched.back());
  const double avg = std::abs(cesaro_average(x, sched.back(), par));
  const double bound = stat + inst + 5.0 / std::sqrt(n);
  o.record(avg);
  o.record(stat);
  o.record(inst);
  o.gate(avg <= bound, fmt("|cesaro| %.3e <= strong %.3e + instability %.3e + 5/sqrt(N) = %.3e", avg, stat, inst,
                           bound));
  return o;
}

Outcome polynomial(Parallelism par) {
  Outcome o;
  const MPSystem sys = canned::fair_bernoulli();
  const Complex p = polynomial_average(sys, canned::canonical_observable(sys), IntPolynomial({0, 0, 1}), kN, par);
  o.record(p);
  o.gate(std::abs(p) <= 1e-2, fmt("|polynomial average n^2| = %.3e <= 1e-2", std::abs(p)));
  const ComplexSeq x = canonical_orbit();
  const SubsequenceSchedule sched = horizons_to(kN, 2.0);
  const CorrelationProfile prof = correlation_profile(x, x, sched, 900, {}, par);
  const double s = squares_cesaro(prof, 30);
  o.record(s);
  o.gate(s <= 0.05, fmt("squares_cesaro(H=30) = %.3e <= 0.05", s));
  return o;
}

using Criterion = std::function<Outcome(Parallelism)>;

const std::vector<std::pair<std::string, Criterion>>& criteria() {
  static const std::vector<std::pair<std::string, Criterion>> all = {
      {"eigenfunction exactness", eigenfunction},
      {"twisted averages vanish", wiener_wintner},
      {"Birkhoff average", birkhoff},
      {"block sequence bound", block_bound},
      {"compactness", compactness},
      {"Bernoulli orbit vs block sequence", perp_compact},
      {"system defects", defects},
      {"strongly mixing tail", strong_tail},
      {"adversarial lower bound", adversarial},
      {"converse decomposition", converse},
      {"estimator form", estimator_form},
      {"polynomial and squares averages", polynomial},
  };
  return all;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

Outcome determinism() {
  Outcome o;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    const auto& [name, run] = criteria()[i];
    const std::vector<double> base = run(Parallelism{1}).fingerprint;
    for (unsigned k : {4u, 8u}) {
      const std::vector<double> again = run(Parallelism{k}).fingerprint;
      o.gate(same_bits(base, again),
             fmt("criterion %zu (%s): %zu values at %u threads match 1 thread", i + 1, name.c_str(), base.size(), k));
    }
  }
  return o;
}

bool report(std::size_t index, const std::string& name, const Outcome& o, bool verbose) {
  if (verbose) {
    for (const std::string& n : o.notes) std::cout << "    " << n << '\n';
  }
  std::cout << "criterion " << index << " (" << name << "): " << (o.pass ? "PASS" : "FAIL") << std::endl;
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergolab acceptance suite"};
  std::size_t only = 0;
  unsigned threads = 1;
  bool quiet = false;
  app.add_option("--criterion", only, "Run a single criterion (1-13)")->check(CLI::Range(1, 13));
  app.add_option("--threads", threads, "Worker threads for criteria 1-12")->check(CLI::Range(1u, 1024u));
  app.add_flag("--quiet", quiet, "Only print the PASS/FAIL lines");
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  const std::size_t count = criteria().size();
  for (std::size_t i = 1; i <= count + 1; ++i) {
    if (only != 0 && only != i) continue;
    try {
      if (i <= count) {
        const auto& [name, run] = criteria()[i - 1];
        all_pass = report(i, name, run(Parallelism{threads}), !quiet) && all_pass;
      } else {
        all_pass = report(i, "determinism at 1, 4, 8 threads", determinism(), !quiet) && all_pass;
      }
    } catch (const std::exception& e) {
      std::cout << "    error: " << e.what() << '\n' << "criterion " << i << ": FAIL" << std::endl;
      all_pass = false;
    }
  }
  return all_pass ? 0 : 1;
}
