#pragma once

// Deterministic long-sum reduction.
//
// Terms are grouped into fixed 4096-element chunks counted from the first
// index. Each chunk is summed with Neumaier compensation, and chunk partials
// are folded left to right with the same compensation. The grouping depends
// only on the index range, so the result is bit-identical for any worker
// count.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace ergolab {

inline constexpr std::uint64_t kChunkSize = 4096;

struct Parallelism {
  unsigned threads = 1;
};

/// Neumaier (improved Kahan-Babuska) running sum.
template <class Scalar>
class CompensatedSum;

template <>
class CompensatedSum<double> {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

template <>
class CompensatedSum<std::complex<double>> {
 public:
  void add(std::complex<double> v) {
    re_.add(v.real());
    im_.add(v.imag());
  }
  void add(double re, double im) {
    re_.add(re);
    im_.add(im);
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<double> re_;
  CompensatedSum<double> im_;
};

/// Runs fn(i) for i in [0, count), splitting the range into contiguous
/// blocks, one per worker. fn must be safe to call concurrently. An exception
/// from any worker is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t count, Parallelism par, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, par.threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      pool.emplace_back([begin, end, &fn, &err = errors[w]] {
        try {
          for (std::size_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          err = std::current_exception();
        }
      });
    }
  }
  // Lowest block first, matching what a sequential run would raise.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Sum of term(first), ..., term(first + count - 1).
template <class Scalar, class Term>
Scalar ordered_sum(std::uint64_t first, std::uint64_t count, Term&& term, Parallelism par = {}) {
  const std::uint64_t chunks = (count + kChunkSize - 1) / kChunkSize;
  std::vector<Scalar> partials(chunks);
  parallel_for(chunks, par, [&](std::size_t c) {
    const std::uint64_t begin = first + c * kChunkSize;
    const std::uint64_t end = first + std::min(count, (c + 1) * kChunkSize);
    CompensatedSum<Scalar> acc;
    for (std::uint64_t n = begin; n < end; ++n) acc.add(term(n));
    partials[c] = acc.value();
  });
  CompensatedSum<Scalar> total;
  for (const Scalar& p : partials) total.add(p);
  return total.value();
}

/// Sums of the first counts[q] terms for every q, in one sequential pass.
/// counts must be nondecreasing. Each result is bit-identical to
/// ordered_sum(first, counts[q], term).
template <class Scalar, class Term>
std::vector<Scalar> ordered_prefix_sums(std::uint64_t first, std::span<const std::uint64_t> counts,
                                        Term&& term) {
  std::vector<Scalar> out(counts.size());
  if (counts.empty()) return out;
  CompensatedSum<Scalar> folded;  // completed chunks
  CompensatedSum<Scalar> chunk;   // current chunk
  std::uint64_t done = 0;         // terms consumed
  std::size_t q = 0;
  while (q < counts.size() && counts[q] == 0) out[q++] = Scalar{};
  while (q < counts.size()) {
    chunk.add(term(first + done));
    ++done;
    const bool chunk_closed = done % kChunkSize == 0;
    while (q < counts.size() && counts[q] == done) {
      CompensatedSum<Scalar> snapshot = folded;
      snapshot.add(chunk.value());
      out[q++] = snapshot.value();
    }
    if (chunk_closed) {
      folded.add(chunk.value());
      chunk = {};
    }
  }
  return out;
}

}  // namespace ergolab
