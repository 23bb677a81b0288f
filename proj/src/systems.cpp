#include "ergolab/systems.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string fixed_point_text(CirclePoint p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", p.to_double());
  return buf;
}

std::uint64_t ipow(std::uint32_t base, std::uint32_t exp) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    if (r > (std::uint64_t{1} << 63) / std::max<std::uint32_t>(base, 1)) {
      throw NumericGuardError("word space alphabet^window exceeds 2^63");
    }
    r *= base;
  }
  return r;
}

const SymbolStream& stream_of(const MPSystem& sys) {
  return std::get<BernoulliSystem>(sys.kind).stream;
}

}  // namespace

MPSystem make_rotation(CirclePoint alpha, CirclePoint x0) {
  return {RotationSystem{alpha, x0},
          "rotation(alpha=" + fixed_point_text(alpha) + ", x0=" + fixed_point_text(x0) + ")"};
}

MPSystem make_bernoulli(std::vector<double> probs, std::uint64_t seed) {
  std::string text = "bernoulli(probs=[";
  for (std::size_t k = 0; k < probs.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.17g", k ? "," : "", probs[k]);
    text += buf;
  }
  text += "], seed=" + std::to_string(seed) + ")";
  return {BernoulliSystem{SymbolStream(std::move(probs), seed)}, std::move(text)};
}

MPSystem make_product(MPSystem left, MPSystem right) {
  std::string text = "product(" + left.description + ", " + right.description + ")";
  return {ProductSystem{std::make_shared<const MPSystem>(std::move(left)),
                        std::make_shared<const MPSystem>(std::move(right))},
          std::move(text)};
}

bool operator==(const Point& a, const Point& b) {
  if (a.value.index() != b.value.index()) return false;
  return std::visit(
      overloaded{
          [&](const CirclePoint& p) { return p == std::get<CirclePoint>(b.value); },
          [&](const StreamOffset& s) { return s == std::get<StreamOffset>(b.value); },
          [&](const std::vector<Point>& v) {
            const auto& w = std::get<std::vector<Point>>(b.value);
            return std::equal(v.begin(), v.end(), w.begin(), w.end());
          },
      },
      a.value);
}

Point iterate_point(const MPSystem& sys, std::uint64_t n) {
  return std::visit(overloaded{
                        [n](const RotationSystem& r) { return Point{r.start + r.alpha.scaled(n)}; },
                        [n](const BernoulliSystem&) { return Point{StreamOffset{n}}; },
                        [n](const ProductSystem& p) {
                          return Point{std::vector<Point>{iterate_point(*p.left, n),
                                                          iterate_point(*p.right, n)}};
                        },
                    },
                    sys.kind);
}

// ---------------------------------------------------------------------------
// Observables

double Observable::bound() const {
  double b = std::visit(overloaded{
                            [](const TrigObservable& t) {
                              double s = 0.0;
                              for (const auto& term : t.terms) s += std::abs(term.amplitude);
                              return s;
                            },
                            [](const IndicatorObservable& ind) {
                              double s = 0.0;
                              for (const auto& piece : ind.pieces) s += std::abs(piece.weight);
                              return s;
                            },
                            [](const CylinderObservable& c) {
                              double s = 0.0;
                              for (const auto& v : c.table) s = std::max(s, std::abs(v));
                              return s;
                            },
                        },
                        form);
  return b + std::abs(shift);
}

Observable trig_observable(std::vector<TrigTerm> terms) { return {TrigObservable{std::move(terms)}}; }

Observable exp_observable(std::int64_t k) { return trig_observable({{k, Complex(1.0, 0.0)}}); }

Observable indicator_observable(std::vector<WeightedArc> pieces) {
  return {IndicatorObservable{std::move(pieces)}};
}

Observable cylinder_observable(std::uint32_t alphabet, std::uint32_t window, std::vector<Complex> table) {
  if (alphabet == 0 || window == 0) throw DomainError("cylinder observable needs alphabet, window >= 1");
  const std::uint64_t words = ipow(alphabet, window);
  if (words > kMaxCylinderTable) throw NumericGuardError("cylinder table exceeds 2^24 words");
  if (table.size() != words) {
    throw DomainError("cylinder table has " + std::to_string(table.size()) + " entries, expected " +
                      std::to_string(words));
  }
  return {CylinderObservable{alphabet, window, std::move(table)}};
}

Observable cylinder_observable(std::uint32_t alphabet, std::uint32_t window,
                               const std::function<Complex(std::span<const std::uint32_t>)>& fn) {
  if (alphabet == 0 || window == 0) throw DomainError("cylinder observable needs alphabet, window >= 1");
  const std::uint64_t words = ipow(alphabet, window);
  if (words > kMaxCylinderTable) throw NumericGuardError("cylinder table exceeds 2^24 words");
  std::vector<Complex> table(words);
  std::vector<std::uint32_t> word(window);
  for (std::uint64_t code = 0; code < words; ++code) {
    std::uint64_t c = code;
    for (std::uint32_t j = window; j-- > 0;) {
      word[j] = static_cast<std::uint32_t>(c % alphabet);
      c /= alphabet;
    }
    table[code] = fn(word);
  }
  return cylinder_observable(alphabet, window, std::move(table));
}

Observable doubling_cosine(std::uint32_t window) {
  return cylinder_observable(2, window, [](std::span<const std::uint32_t> bits) {
    double x = 0.0;
    double scale = 0.5;
    for (std::uint32_t b : bits) {
      x += scale * b;
      scale *= 0.5;
    }
    return Complex(std::cos(kTwoPi * x), 0.0);
  });
}

Observable first_symbol(std::vector<Complex> values) {
  const auto alphabet = static_cast<std::uint32_t>(values.size());
  return cylinder_observable(alphabet, 1, std::move(values));
}

Complex evaluate(const Observable& f, CirclePoint x) {
  Complex v = std::visit(overloaded{
                             [x](const TrigObservable& t) {
                               Complex s{};
                               for (const auto& term : t.terms) {
                                 s += term.amplitude * unit_phasor(x.scaled_signed(term.frequency));
                               }
                               return s;
                             },
                             [x](const IndicatorObservable& ind) {
                               Complex s{};
                               for (const auto& piece : ind.pieces) {
                                 if (piece.arc.contains(x)) s += piece.weight;
                               }
                               return s;
                             },
                             [](const CylinderObservable&) -> Complex {
                               throw IncompatibleError("cylinder observable evaluated on a circle point");
                             },
                         },
                         f.form);
  return v - f.shift;
}

Complex evaluate(const Observable& f, const SymbolStream& stream, std::uint64_t offset) {
  const auto* cyl = std::get_if<CylinderObservable>(&f.form);
  if (cyl == nullptr) throw IncompatibleError("circle observable evaluated on a symbol stream");
  std::uint64_t code = 0;
  for (std::uint32_t j = 0; j < cyl->window; ++j) code = code * cyl->alphabet + stream(offset + j);
  return cyl->table[code] - f.shift;
}

const MPSystem& observable_factor(const MPSystem& sys, const Observable& f) {
  if (const auto* p = std::get_if<ProductSystem>(&sys.kind)) {
    try {
      return observable_factor(*p->left, f);
    } catch (const IncompatibleError&) {
      return observable_factor(*p->right, f);
    }
  }
  if (std::holds_alternative<RotationSystem>(sys.kind)) {
    if (!f.on_circle()) throw IncompatibleError("cylinder observable on a rotation");
    return sys;
  }
  const auto* cyl = std::get_if<CylinderObservable>(&f.form);
  if (cyl == nullptr) throw IncompatibleError("circle observable on a Bernoulli shift");
  if (cyl->alphabet != stream_of(sys).alphabet_size()) {
    throw IncompatibleError("cylinder observable alphabet differs from the shift's alphabet");
  }
  return sys;
}

Complex exact_mean(const MPSystem& sys, const Observable& f) {
  const MPSystem& factor = observable_factor(sys, f);
  Complex mean = std::visit(
      overloaded{
          [](const TrigObservable& t) {
            Complex s{};
            for (const auto& term : t.terms) {
              if (term.frequency == 0) s += term.amplitude;
            }
            return s;
          },
          [](const IndicatorObservable& ind) {
            Complex s{};
            for (const auto& piece : ind.pieces) s += piece.weight * piece.arc.measure();
            return s;
          },
          [&factor](const CylinderObservable& c) {
            const auto probs = stream_of(factor).probs();
            // Word probabilities built one coordinate at a time.
            std::vector<double> p{1.0};
            for (std::uint32_t j = 0; j < c.window; ++j) {
              std::vector<double> next(p.size() * c.alphabet);
              for (std::size_t w = 0; w < p.size(); ++w) {
                for (std::uint32_t s = 0; s < c.alphabet; ++s) next[w * c.alphabet + s] = p[w] * probs[s];
              }
              p = std::move(next);
            }
            CompensatedSum<Complex> acc;
            for (std::size_t w = 0; w < p.size(); ++w) acc.add(p[w] * c.table[w]);
            return acc.value();
          },
      },
      f.form);
  return mean - f.shift;
}

Observable centered(const MPSystem& sys, Observable f) {
  f.shift += exact_mean(sys, f);
  f.mean_zero_adjusted = true;
  return f;
}

ComplexSeq orbit_sequence(const MPSystem& sys, const Observable& f) {
  const MPSystem& factor = observable_factor(sys, f);
  const double bound = f.bound();
  if (const auto* r = std::get_if<RotationSystem>(&factor.kind)) {
    return ComplexSeq([rot = *r, f](std::uint64_t n) { return evaluate(f, rot.start + rot.alpha.scaled(n)); },
                      bound);
  }
  return ComplexSeq([stream = stream_of(factor), f](std::uint64_t n) { return evaluate(f, stream, n); },
                    bound);
}

std::vector<Complex> orbit_eval(const MPSystem& sys, const Observable& f, std::uint64_t n_start,
                                std::uint64_t n_count, Parallelism par) {
  return orbit_sequence(sys, f).materialize(n_start, n_count, par);
}

// ---------------------------------------------------------------------------
// Measurable sets

bool CylinderSet::is_full() const { return words.size() == word_count(alphabet(), window); }

std::uint64_t word_count(std::uint32_t alphabet, std::uint32_t window) { return ipow(alphabet, window); }

double word_probability(std::uint64_t code, std::uint32_t window, std::span<const double> probs) {
  const auto alphabet = static_cast<std::uint32_t>(probs.size());
  double p = 1.0;
  std::uint64_t scale = ipow(alphabet, window);
  for (std::uint32_t j = 0; j < window; ++j) {
    scale /= alphabet;
    p *= probs[(code / scale) % alphabet];
  }
  return p;
}

MeasurableSet circle_set(std::vector<CircleArc> arcs) {
  using U = unsigned __int128;
  const U one = static_cast<U>(1) << 64;
  std::vector<std::pair<U, U>> segments;
  for (const CircleArc& a : arcs) {
    if (a.full) {
      segments.emplace_back(0, one);
      continue;
    }
    if (a.length == 0) continue;
    const U begin = a.start.frac;
    const U end = begin + a.length;
    if (end <= one) {
      segments.emplace_back(begin, end);
    } else {
      segments.emplace_back(begin, one);
      segments.emplace_back(0, end - one);
    }
  }
  std::sort(segments.begin(), segments.end());
  std::vector<std::pair<U, U>> merged;
  for (const auto& s : segments) {
    if (!merged.empty() && s.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, s.second);
    } else {
      merged.push_back(s);
    }
  }
  CircleIntervals out;
  for (const auto& [b, e] : merged) {
    if (b == 0 && e == one) {
      out.arcs.push_back(CircleArc::whole());
    } else {
      out.arcs.push_back({CirclePoint{static_cast<std::uint64_t>(b)}, static_cast<std::uint64_t>(e - b), false});
    }
  }
  return {std::move(out)};
}

MeasurableSet circle_set_from_bounds(const std::vector<std::pair<double, double>>& bounds) {
  std::vector<CircleArc> arcs;
  arcs.reserve(bounds.size());
  for (const auto& [lo, hi] : bounds) arcs.push_back(CircleArc::between(lo, hi));
  return circle_set(std::move(arcs));
}

MeasurableSet cylinder_set_from_codes(std::vector<double> probs, std::uint32_t window,
                                      std::vector<std::uint64_t> codes) {
  // Validates the distribution the same way the shift does.
  (void)SymbolStream(probs, 0);
  if (window == 0) throw DomainError("cylinder set window must be >= 1");
  const std::uint64_t total = word_count(static_cast<std::uint32_t>(probs.size()), window);
  for (std::uint64_t c : codes) {
    if (c >= total) throw DomainError("cylinder word code out of range");
  }
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  return {CylinderSet{window, std::move(probs), std::move(codes)}};
}

MeasurableSet cylinder_set(std::vector<double> probs, std::uint32_t window,
                           const std::vector<std::vector<std::uint32_t>>& words) {
  const auto alphabet = static_cast<std::uint32_t>(probs.size());
  std::vector<std::uint64_t> codes;
  codes.reserve(words.size());
  for (const auto& w : words) {
    if (w.size() != window) throw DomainError("cylinder word length differs from window");
    std::uint64_t code = 0;
    for (std::uint32_t s : w) {
      if (s >= alphabet) throw DomainError("cylinder word symbol outside alphabet");
      code = code * alphabet + s;
    }
    codes.push_back(code);
  }
  return cylinder_set_from_codes(std::move(probs), window, std::move(codes));
}

MeasurableSet full_space(const MPSystem& sys) {
  if (std::holds_alternative<RotationSystem>(sys.kind)) return circle_set({CircleArc::whole()});
  if (const auto* b = std::get_if<BernoulliSystem>(&sys.kind)) {
    const auto probs = b->stream.probs();
    std::vector<std::uint64_t> all(probs.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    return cylinder_set_from_codes({probs.begin(), probs.end()}, 1, std::move(all));
  }
  throw IncompatibleError("product systems have no set algebra in this version");
}

MeasurableSet empty_set(const MPSystem& sys) {
  if (std::holds_alternative<RotationSystem>(sys.kind)) return {CircleIntervals{}};
  if (const auto* b = std::get_if<BernoulliSystem>(&sys.kind)) {
    const auto probs = b->stream.probs();
    return cylinder_set_from_codes({probs.begin(), probs.end()}, 1, {});
  }
  throw IncompatibleError("product systems have no set algebra in this version");
}

double exact_measure(const MeasurableSet& s) {
  return std::visit(overloaded{
                        [](const CircleIntervals& c) {
                          unsigned __int128 units = 0;
                          for (const auto& a : c.arcs) units += a.units();
                          return units_to_measure(units);
                        },
                        [](const CylinderSet& c) {
                          if (c.is_full()) return 1.0;
                          CompensatedSum<double> acc;
                          for (std::uint64_t w : c.words) acc.add(word_probability(w, c.window, c.probs));
                          return acc.value();
                        },
                    },
                    s.kind);
}

namespace {

double rotation_correlation(const RotationSystem& r, const CircleIntervals& a, const CircleIntervals& b,
                            std::uint64_t n) {
  // T^{-n} B = B - n alpha.
  const CirclePoint shift = r.alpha.scaled(n);
  unsigned __int128 units = 0;
  for (const auto& arc_b : b.arcs) {
    CircleArc moved = arc_b;
    moved.start = arc_b.start - shift;
    for (const auto& arc_a : a.arcs) units += overlap_units(arc_a, moved);
  }
  return units_to_measure(units);
}

double cylinder_correlation(const SymbolStream& stream, const CylinderSet& a, const CylinderSet& b,
                            std::uint64_t n) {
  const auto probs = stream.probs();
  if (!std::equal(probs.begin(), probs.end(), a.probs.begin(), a.probs.end()) ||
      !std::equal(probs.begin(), probs.end(), b.probs.begin(), b.probs.end())) {
    throw IncompatibleError("cylinder set distribution differs from the shift's distribution");
  }
  if (a.is_full()) return exact_measure({b});
  if (b.is_full()) return exact_measure({a});
  if (n >= a.window) return exact_measure({a}) * exact_measure({b});

  // A constrains coordinates [0, wA), T^{-n}B constrains [n, n + wB).
  // They share `shared` coordinates starting at n.
  const std::uint32_t alphabet = a.alphabet();
  const auto shared = static_cast<std::uint32_t>(std::min<std::uint64_t>(a.window - n, b.window));
  const std::uint32_t b_tail = b.window - shared;
  const std::uint32_t a_after = static_cast<std::uint32_t>(a.window - n) - shared;
  const std::uint64_t b_tail_words = word_count(alphabet, b_tail);
  const std::uint64_t a_after_words = word_count(alphabet, a_after);
  const std::uint64_t shared_words = word_count(alphabet, shared);

  std::unordered_map<std::uint64_t, CompensatedSum<double>> tail_mass;
  for (std::uint64_t w : b.words) {
    tail_mass[w / b_tail_words].add(word_probability(w % b_tail_words, b_tail, b.probs));
  }
  CompensatedSum<double> acc;
  for (std::uint64_t w : a.words) {
    const std::uint64_t overlap = (w / a_after_words) % shared_words;
    const auto it = tail_mass.find(overlap);
    if (it == tail_mass.end()) continue;
    acc.add(word_probability(w, a.window, a.probs) * it->second.value());
  }
  return acc.value();
}

}  // namespace

double exact_set_correlation(const MPSystem& sys, const MeasurableSet& a, const MeasurableSet& b,
                             std::uint64_t n) {
  if (std::holds_alternative<ProductSystem>(sys.kind)) {
    throw IncompatibleError("exact set correlation is not supported for product systems");
  }
  if (const auto* r = std::get_if<RotationSystem>(&sys.kind)) {
    const auto* ca = std::get_if<CircleIntervals>(&a.kind);
    const auto* cb = std::get_if<CircleIntervals>(&b.kind);
    if (ca == nullptr || cb == nullptr) throw IncompatibleError("rotation needs circle interval sets");
    return rotation_correlation(*r, *ca, *cb, n);
  }
  const auto* ya = std::get_if<CylinderSet>(&a.kind);
  const auto* yb = std::get_if<CylinderSet>(&b.kind);
  if (ya == nullptr || yb == nullptr) throw IncompatibleError("Bernoulli shift needs cylinder sets");
  return cylinder_correlation(stream_of(sys), *ya, *yb, n);
}

Observable indicator_of(const MeasurableSet& s) {
  return std::visit(overloaded{
                        [](const CircleIntervals& c) {
                          std::vector<WeightedArc> pieces;
                          for (const auto& arc : c.arcs) pieces.push_back({arc, Complex(1.0, 0.0)});
                          return indicator_observable(std::move(pieces));
                        },
                        [](const CylinderSet& c) {
                          std::vector<Complex> table(word_count(c.alphabet(), c.window));
                          if (table.size() > kMaxCylinderTable) {
                            throw NumericGuardError("cylinder indicator table exceeds 2^24 words");
                          }
                          for (std::uint64_t w : c.words) table[w] = 1.0;
                          return cylinder_observable(c.alphabet(), c.window, std::move(table));
                        },
                    },
                    s.kind);
}

}  // namespace ergolab
