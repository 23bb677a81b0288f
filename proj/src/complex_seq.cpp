#include "ergolab/complex_seq.hpp"

#include <stdexcept>
#include <string>

namespace ergolab {

void ComplexSeq::fill(std::uint64_t first, std::span<Complex> out, Parallelism par) const {
  const std::uint64_t blocks = (out.size() + kChunkSize - 1) / kChunkSize;
  parallel_for(blocks, par, [&](std::size_t b) {
    const std::size_t begin = b * kChunkSize;
    const std::size_t end = std::min<std::size_t>(out.size(), begin + kChunkSize);
    for (std::size_t k = begin; k < end; ++k) out[k] = (*gen_)(first + k);
  });
}

std::vector<Complex> ComplexSeq::materialize(std::uint64_t first, std::uint64_t count,
                                             Parallelism par) const {
  std::vector<Complex> out(count);
  fill(first, out, par);
  return out;
}

ComplexSeq ComplexSeq::constant(Complex c) {
  return ComplexSeq([c](std::uint64_t) { return c; }, std::abs(c));
}

ComplexSeq ComplexSeq::from_values(std::vector<Complex> values, std::uint64_t first) {
  double bound = 0.0;
  for (const Complex& v : values) bound = std::max(bound, std::abs(v));
  auto data = std::make_shared<const std::vector<Complex>>(std::move(values));
  return ComplexSeq(
      [data, first](std::uint64_t n) {
        if (n < first || n - first >= data->size()) {
          throw std::out_of_range("sequence index " + std::to_string(n) + " outside stored range [" +
                                  std::to_string(first) + ", " +
                                  std::to_string(first + data->size()) + ")");
        }
        return (*data)[n - first];
      },
      bound);
}

ComplexSeq ComplexSeq::alternating() {
  return ComplexSeq([](std::uint64_t n) { return Complex(n % 2 == 0 ? 1.0 : -1.0, 0.0); }, 1.0);
}

ComplexSeq ComplexSeq::character(CirclePoint angle) {
  return ComplexSeq([angle](std::uint64_t n) { return unit_phasor(angle.scaled(n)); }, 1.0);
}

ComplexSeq operator+(const ComplexSeq& a, const ComplexSeq& b) {
  return ComplexSeq([a, b](std::uint64_t n) { return a(n) + b(n); }, a.bound() + b.bound(),
                    a.uniformly_bounded() && b.uniformly_bounded());
}

ComplexSeq operator*(Complex s, const ComplexSeq& x) {
  return ComplexSeq([s, x](std::uint64_t n) { return s * x(n); }, std::abs(s) * x.bound(),
                    x.uniformly_bounded());
}

ComplexSeq shifted(const ComplexSeq& x, std::uint64_t h) {
  return ComplexSeq([x, h](std::uint64_t n) { return x(n + h); }, x.bound(), x.uniformly_bounded());
}

}  // namespace ergolab
