#include "ergolab/counter_rng.hpp"

#include <cmath>

#include "ergolab/errors.hpp"

namespace ergolab {

SymbolStream::SymbolStream(std::vector<double> probs, std::uint64_t seed)
    : probs_(std::move(probs)), seed_(seed), stream_(seed) {
  if (probs_.empty()) throw DomainError("symbol stream needs a nonempty alphabet");
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw DomainError("symbol probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("symbol probabilities must sum to 1");

  long double cumulative = 0.0L;
  for (std::size_t k = 0; k + 1 < probs_.size(); ++k) {
    cumulative += probs_[k];
    const long double scaled = std::nearbyint(std::ldexp(cumulative, 64));
    thresholds_.push_back(scaled >= 0x1p64L ? ~std::uint64_t{0} : static_cast<std::uint64_t>(scaled));
  }
}

std::uint32_t SymbolStream::operator()(std::uint64_t index) const {
  const std::uint64_t u = stream_(index);
  std::uint32_t k = 0;
  while (k < thresholds_.size() && u >= thresholds_[k]) ++k;
  return k;
}

}  // namespace ergolab
