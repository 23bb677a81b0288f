#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ergolab/circle.hpp"
#include "ergolab/reduce.hpp"

namespace ergolab {

/// A lazily generated complex sequence with deterministic indexed access.
///
/// Indices follow the 1-based convention of Cesaro sums, but every
/// generator is defined on all of [0, 2^64) unless it wraps finite data.
/// Generators must be pure: the same index may be evaluated concurrently
/// and repeatedly.
class ComplexSeq {
 public:
  using Generator = std::function<Complex(std::uint64_t)>;

  ComplexSeq() : ComplexSeq(constant({})) {}
  ComplexSeq(Generator gen, double bound, bool uniformly_bounded = true)
      : gen_(std::make_shared<const Generator>(std::move(gen))),
        bound_(bound),
        uniform_(uniformly_bounded) {}

  Complex operator()(std::uint64_t n) const { return (*gen_)(n); }

  /// Uniform bound on |x_n| when uniformly_bounded(), otherwise a bound on
  /// the upper Cesaro mean of |x_n|.
  double bound() const { return bound_; }
  bool uniformly_bounded() const { return uniform_; }

  /// Writes x_first, ..., x_{first + out.size() - 1}.
  void fill(std::uint64_t first, std::span<Complex> out, Parallelism par = {}) const;
  std::vector<Complex> materialize(std::uint64_t first, std::uint64_t count, Parallelism par = {}) const;

  static ComplexSeq constant(Complex c);
  /// values[k] becomes x_{first + k}; other indices throw std::out_of_range.
  static ComplexSeq from_values(std::vector<Complex> values, std::uint64_t first = 1);
  /// (-1)^n.
  static ComplexSeq alternating();
  /// lambda^n for lambda = e^{2 pi i angle}, with n * angle reduced exactly.
  static ComplexSeq character(CirclePoint angle);

 private:
  std::shared_ptr<const Generator> gen_;
  double bound_ = 0.0;
  bool uniform_ = true;
};

ComplexSeq operator+(const ComplexSeq& a, const ComplexSeq& b);
ComplexSeq operator*(Complex a, const ComplexSeq& x);
/// n -> x_{n + h}.
ComplexSeq shifted(const ComplexSeq& x, std::uint64_t h);

}  // namespace ergolab
