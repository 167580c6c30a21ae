#pragma once

#include <complex>
#include <cstdint>

#include "syztrop/rational.hpp"

namespace syztrop {

// Hand-rolled splitmix64 generator.  Seeded reports must be byte-identical
// across platforms, which rules out the standard library distributions.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, n)
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  long int_in(long lo, long hi) {  // inclusive bounds
    return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // uniform double in [0,1) with 53 bits
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double in(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // rational with numerator in [-max_num, max_num] and denominator drawn
  // from the given choices
  Rational rational_in(long max_num, std::initializer_list<long> denominators) {
    long num = int_in(-max_num, max_num);
    long den = *(denominators.begin() + below(denominators.size()));
    return rational(num, den);
  }

  // complex with modulus kept away from zero so products never fall under
  // the coefficient cleanup threshold
  std::complex<double> complex_unit_scale() {
    for (;;) {
      std::complex<double> c(in(-1.0, 1.0), in(-1.0, 1.0));
      if (std::abs(c) >= 0.2 && std::abs(c) <= 1.5) return c;
    }
  }

  // derive an independent stream (for deterministic parallel chunks)
  Prng fork(std::uint64_t salt) const {
    Prng p(state_ ^ (salt * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
    p.next_u64();
    return p;
  }

 private:
  std::uint64_t state_;
};

}  // namespace syztrop
