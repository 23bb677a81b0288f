#pragma once

#include <stdexcept>

namespace ergolab {

/// Experiment configuration failed schema validation.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Observable, set, or system kinds that cannot be combined.
struct IncompatibleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An index or polynomial value left the representable range.
struct NumericGuardError : std::range_error {
  using std::range_error::range_error;
};

/// Malformed input to an operation (bad interval, bad probability vector, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The greedy schedule search ran past its probe limit.
struct ProbeExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A companion sequence was queried outside the blocks its schedule covers.
struct CoverageError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

}  // namespace ergolab
