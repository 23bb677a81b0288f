#pragma once

// Measure-preserving systems with exact orbits and exact measures.
//
// Three families are provided: circle rotations (ergodic, not weakly
// mixing), Bernoulli shifts (strongly mixing), and products of these.
// The doubling map is realized as the fair binary Bernoulli shift, whose
// observables read a finite binary window.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ergolab/circle.hpp"
#include "ergolab/complex_seq.hpp"
#include "ergolab/counter_rng.hpp"
#include "ergolab/reduce.hpp"

namespace ergolab {

struct MPSystem;

/// x -> x + alpha on the circle, started at x0.
struct RotationSystem {
  CirclePoint alpha;
  CirclePoint start;
};

/// Left shift on symbol sequences. The base point is the seeded stream
/// itself, so T^n x is the stream read from offset n.
struct BernoulliSystem {
  SymbolStream stream;
};

struct ProductSystem {
  std::shared_ptr<const MPSystem> left;
  std::shared_ptr<const MPSystem> right;
};

struct MPSystem {
  std::variant<RotationSystem, BernoulliSystem, ProductSystem> kind;
  std::string description;
};

MPSystem make_rotation(CirclePoint alpha, CirclePoint x0 = {});
MPSystem make_bernoulli(std::vector<double> probs, std::uint64_t seed = kDefaultSeed);
MPSystem make_product(MPSystem left, MPSystem right);

struct StreamOffset {
  std::uint64_t value = 0;
  friend bool operator==(StreamOffset, StreamOffset) = default;
};

/// A state of an MPSystem: a circle point, a stream offset, or a pair of
/// component states.
struct Point {
  std::variant<CirclePoint, StreamOffset, std::vector<Point>> value;
};
bool operator==(const Point& a, const Point& b);

/// T^n x for the system's base point x.
Point iterate_point(const MPSystem& sys, std::uint64_t n);

// ---------------------------------------------------------------------------
// Observables

/// amplitude * e^{2 pi i frequency x}
struct TrigTerm {
  std::int64_t frequency = 0;
  Complex amplitude;
};

struct WeightedArc {
  CircleArc arc;
  Complex weight;
};

struct TrigObservable {
  std::vector<TrigTerm> terms;
};

struct IndicatorObservable {
  std::vector<WeightedArc> pieces;
};

/// Table over all words of length `window`. A word s_0 ... s_{w-1} has code
/// sum_j s_j * alphabet^{w-1-j}.
struct CylinderObservable {
  std::uint32_t alphabet = 2;
  std::uint32_t window = 1;
  std::vector<Complex> table;
};

/// Largest table a cylinder observable may carry.
inline constexpr std::uint64_t kMaxCylinderTable = std::uint64_t{1} << 24;

struct Observable {
  std::variant<TrigObservable, IndicatorObservable, CylinderObservable> form;
  /// Constant subtracted from every value.
  Complex shift{};
  bool mean_zero_adjusted = false;

  bool on_circle() const { return !std::holds_alternative<CylinderObservable>(form); }
  /// Uniform bound on |f|.
  double bound() const;
};

Observable trig_observable(std::vector<TrigTerm> terms);
/// e^{2 pi i k x}.
Observable exp_observable(std::int64_t k = 1);
Observable indicator_observable(std::vector<WeightedArc> pieces);
/// Validates that the table covers every word of the window.
Observable cylinder_observable(std::uint32_t alphabet, std::uint32_t window, std::vector<Complex> table);
Observable cylinder_observable(std::uint32_t alphabet, std::uint32_t window,
                               const std::function<Complex(std::span<const std::uint32_t>)>& fn);
/// cos(2 pi 0.s_0 s_1 ... s_{w-1}) in binary: the doubling map's cos(2 pi x)
/// read through a finite window.
Observable doubling_cosine(std::uint32_t window);
/// Reads only the first coordinate: f = values[s_0].
Observable first_symbol(std::vector<Complex> values);

Complex evaluate(const Observable& f, CirclePoint x);
Complex evaluate(const Observable& f, const SymbolStream& stream, std::uint64_t offset);

/// First factor (depth first, left before right) on which f can be
/// evaluated. Throws IncompatibleError when there is none.
const MPSystem& observable_factor(const MPSystem& sys, const Observable& f);

Complex exact_mean(const MPSystem& sys, const Observable& f);
/// f minus its exact mean under the system's invariant measure.
Observable centered(const MPSystem& sys, Observable f);

/// n -> f(T^n x), evaluated lazily.
ComplexSeq orbit_sequence(const MPSystem& sys, const Observable& f);

/// f(T^{n_start} x), ..., f(T^{n_start + n_count - 1} x).
std::vector<Complex> orbit_eval(const MPSystem& sys, const Observable& f, std::uint64_t n_start,
                                std::uint64_t n_count, Parallelism par = {});

// ---------------------------------------------------------------------------
// Measurable sets

/// Disjoint arcs in increasing order of start.
struct CircleIntervals {
  std::vector<CircleArc> arcs;
};

/// Set of words constraining coordinates 0 .. window-1, with the symbol
/// distribution that defines its measure.
struct CylinderSet {
  std::uint32_t window = 1;
  std::vector<double> probs;
  std::vector<std::uint64_t> words;  // sorted, unique codes

  std::uint32_t alphabet() const { return static_cast<std::uint32_t>(probs.size()); }
  bool is_full() const;
};

struct MeasurableSet {
  std::variant<CircleIntervals, CylinderSet> kind;
};

/// Normalizes to disjoint arcs.
MeasurableSet circle_set(std::vector<CircleArc> arcs);
/// Convenience for [lo, hi) bounds; throws DomainError on malformed bounds.
MeasurableSet circle_set_from_bounds(const std::vector<std::pair<double, double>>& bounds);
MeasurableSet cylinder_set(std::vector<double> probs, std::uint32_t window,
                           const std::vector<std::vector<std::uint32_t>>& words);
MeasurableSet cylinder_set_from_codes(std::vector<double> probs, std::uint32_t window,
                                      std::vector<std::uint64_t> codes);
MeasurableSet full_space(const MPSystem& sys);
MeasurableSet empty_set(const MPSystem& sys);

/// alphabet^window, or NumericGuardError past 2^63.
std::uint64_t word_count(std::uint32_t alphabet, std::uint32_t window);
/// Probability of a word under i.i.d. symbols.
double word_probability(std::uint64_t code, std::uint32_t window, std::span<const double> probs);

double exact_measure(const MeasurableSet& s);

/// mu(A intersect T^{-n} B). Supported for rotations with circle sets and
/// Bernoulli shifts with cylinder sets over the same distribution; product
/// systems throw IncompatibleError.
double exact_set_correlation(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b,
                             std::uint64_t n);

/// 1_S as an observable on the matching system kind.
Observable indicator_of(const MeasurableSet& s);

}  // namespace ergolab
