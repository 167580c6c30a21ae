#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace syztrop {

// Exact rational scalar used for every exponent, valuation and base
// coordinate.  Coefficients are floating point, exponents never are.
using Rational = mpq_class;

inline Rational rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Parses "p/q", "p", or a plain decimal like "3.14" / "-0.5" into an exact
// rational.  Decimals are read digit-by-digit, so 3.14 becomes 157/50.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  // trim
  const auto first = s.find_first_not_of(" \t");
  const auto last = s.find_last_not_of(" \t");
  if (first == std::string::npos)
    throw std::invalid_argument("empty rational literal");
  s = s.substr(first, last - first + 1);

  if (const auto dot = s.find('.'); dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const std::size_t frac_len = s.size() - dot - 1;
    if (frac_len == 0 || digits.empty())
      throw std::invalid_argument("malformed decimal literal: " + std::string(text));
    mpz_class num;
    if (num.set_str(digits, 10) != 0)
      throw std::invalid_argument("malformed decimal literal: " + std::string(text));
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
    Rational r(num, den);
    r.canonicalize();
    return r;
  }

  Rational r;
  if (r.set_str(s, 10) != 0)
    throw std::invalid_argument("malformed rational literal: " + std::string(text));
  if (r.get_den() == 0)
    throw std::invalid_argument("zero denominator: " + std::string(text));
  r.canonicalize();
  return r;
}

// Canonical "p" or "p/q" form, lossless.
inline std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline std::uint64_t hash_rational(const Rational& r) {
  // FNV-1a over the canonical string; only used for dedup sets.
  std::uint64_t h = 14695981039346656037ull;
  for (char c : to_string(r)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace syztrop
