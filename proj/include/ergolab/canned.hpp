#pragma once

// Pinned inputs shared by verify-lemma and the acceptance suite.

#include <array>
#include <cstdint>

#include "ergolab/circle.hpp"
#include "ergolab/counter_rng.hpp"
#include "ergolab/systems.hpp"

namespace ergolab::canned {

/// Window of the canonical cylinder observable.
inline constexpr std::uint32_t kWindow = 6;

/// Frequencies beta for block-sequence tests.
inline const std::array<double, 8> kBetas = {0.1, 0.2, 0.25, 0.3, 1.0 / 3.0, 0.5, 0.7, 0.41421356237309503};

/// Twist angles t for lambda = e^{2 pi i t}, all away from 0.
inline const std::array<double, 8> kTwists = {0.05, 0.1, 0.25, 1.0 / 3.0, 0.5, 0.61803398874989485, 0.9, 0.99};

inline MPSystem fair_bernoulli(std::uint64_t seed = kDefaultSeed) { return make_bernoulli({0.5, 0.5}, seed); }

/// cos(2 pi x) of the doubling map through a kWindow-bit window, centered.
inline Observable canonical_observable(const MPSystem& sys) { return centered(sys, doubling_cosine(kWindow)); }

/// +-1 on the first symbol.
inline Observable sign_observable() { return first_symbol({Complex(1.0), Complex(-1.0)}); }

}  // namespace ergolab::canned
