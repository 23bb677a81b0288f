#pragma once

// Counter-based pseudorandom streams: value(i) is a pure function of
// (key, i), so any index can be drawn from any thread in any order.

#include <cstdint>
#include <span>
#include <vector>

namespace ergolab {

/// Seed used by all canned experiments unless overridden.
inline constexpr std::uint64_t kDefaultSeed = 0x243F6A8885A308D3ull;

/// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// SplitMix64 evaluated at an arbitrary position of its Weyl sequence.
class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t seed) : key_(mix64(seed)) {}

  constexpr std::uint64_t operator()(std::uint64_t index) const {
    return mix64(key_ + (index + 1) * kGamma);
  }

  /// Independent stream for a named component of an experiment.
  constexpr CounterStream derive(std::uint64_t tag) const {
    return CounterStream(mix64(key_ ^ mix64(tag + kGamma)));
  }

  /// Uniform double in [0,1) with 53 random bits.
  double uniform(std::uint64_t index) const {
    return static_cast<double>((*this)(index) >> 11) * 0x1p-53;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  std::uint64_t key_;
};

/// I.i.d. symbols from a finite alphabet, indexed by position.
class SymbolStream {
 public:
  /// Throws DomainError unless probs is nonempty, nonnegative and sums to 1
  /// within 1e-12.
  SymbolStream(std::vector<double> probs, std::uint64_t seed);

  std::uint32_t operator()(std::uint64_t index) const;

  std::uint32_t alphabet_size() const { return static_cast<std::uint32_t>(probs_.size()); }
  std::span<const double> probs() const { return probs_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<double> probs_;
  // thresholds_[k] = round(2^64 * (p_0 + ... + p_k)); the last entry is implicit.
  std::vector<std::uint64_t> thresholds_;
  std::uint64_t seed_;
  CounterStream stream_;
};

}  // namespace ergolab
