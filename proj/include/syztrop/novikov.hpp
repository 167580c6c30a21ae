#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "syztrop/error.hpp"
#include "syztrop/rational.hpp"

namespace syztrop {

using Complex = std::complex<double>;

// Coefficients below this modulus are float noise and are dropped during
// normalization; otherwise they would corrupt valuations.
inline constexpr double kCoeffCleanupEps = 1e-13;

// Default tolerance for comparing complex coefficients.  Exponents are
// always compared exactly.
inline constexpr double kCoeffCompareTol = 1e-9;

// Default working precision: series are tracked modulo T^20 unless a
// constructor says otherwise.
inline constexpr long kDefaultPrecision = 20;

// Valuation of a truncated series: the smallest exponent, or "infinity at
// the working precision" for a series with no stored term.
class Valuation {
 public:
  static Valuation finite(Rational v) { return Valuation(false, std::move(v)); }
  static Valuation infinite(Rational at_precision) {
    return Valuation(true, std::move(at_precision));
  }

  bool is_infinite() const { return infinite_; }

  // Smallest exponent; only meaningful when finite.
  const Rational& value() const { return value_; }

  // The precision witnessing "infinity": the true valuation is >= this.
  const Rational& infinite_at() const { return value_; }

  // Lower bound valid in both cases: value() when finite, the precision
  // bound when infinite.
  const Rational& lower_bound() const { return value_; }

  friend bool operator==(const Valuation& a, const Valuation& b) {
    if (a.infinite_ != b.infinite_) return false;
    return a.infinite_ ? true : a.value_ == b.value_;
  }
  // Total order with infinity on top.
  friend bool operator<(const Valuation& a, const Valuation& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator>=(const Valuation& a, const Valuation& b) { return !(a < b); }

  bool geq(const Rational& r) const { return infinite_ || value_ >= r; }
  bool gt(const Rational& r) const { return infinite_ || value_ > r; }

 private:
  Valuation(bool inf, Rational v) : infinite_(inf), value_(std::move(v)) {}
  bool infinite_;
  Rational value_;
};

inline std::string to_string(const Valuation& v) {
  if (v.is_infinite()) return "inf";
  return to_string(v.value());
}

// Element of the Novikov field with rational exponents, tracked modulo
// T^precision.  Terms are kept with strictly increasing exponents, all
// below the precision, and no coefficient under the cleanup threshold.
class Novikov {
 public:
  struct Term {
    Rational exp;
    Complex coeff;
  };

  Novikov() : precision_(kDefaultPrecision) {}

  explicit Novikov(Complex constant, Rational precision = Rational(kDefaultPrecision))
      : precision_(std::move(precision)) {
    if (std::abs(constant) >= kCoeffCleanupEps)
      terms_.push_back({Rational(0), constant});
  }

  explicit Novikov(double constant) : Novikov(Complex(constant, 0.0)) {}

  // c * T^e, exact to the usual relative precision.
  static Novikov monomial(Complex c, Rational e) {
    Novikov x;
    x.precision_ = e + kDefaultPrecision;
    if (std::abs(c) >= kCoeffCleanupEps) x.terms_.push_back({std::move(e), c});
    return x;
  }

  static Novikov from_terms(std::vector<Term> terms,
                            Rational precision = Rational(kDefaultPrecision)) {
    Novikov x;
    x.precision_ = std::move(precision);
    x.terms_ = std::move(terms);
    std::sort(x.terms_.begin(), x.terms_.end(),
              [](const Term& a, const Term& b) { return a.exp < b.exp; });
    x.merge_sorted();
    return x;
  }

  static Novikov zero(Rational precision = Rational(kDefaultPrecision)) {
    Novikov x;
    x.precision_ = std::move(precision);
    return x;
  }

  static Novikov one() { return Novikov(Complex(1.0, 0.0)); }

  bool is_zero() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Rational& precision() const { return precision_; }

  Valuation val() const {
    if (terms_.empty()) return Valuation::infinite(precision_);
    return Valuation::finite(terms_.front().exp);
  }

  const Rational& leading_exp() const {
    if (terms_.empty()) throw DomainError("leading_exp of zero series");
    return terms_.front().exp;
  }
  const Complex& leading_coeff() const {
    if (terms_.empty()) throw DomainError("leading_coeff of zero series");
    return terms_.front().coeff;
  }

  // Drops every term with exponent >= p and lowers the tracked precision.
  Novikov truncated(const Rational& p) const {
    Novikov x = *this;
    if (p < x.precision_) {
      x.precision_ = p;
      while (!x.terms_.empty() && x.terms_.back().exp >= p) x.terms_.pop_back();
    }
    return x;
  }

  friend Novikov operator-(const Novikov& x) {
    Novikov r = x;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  friend Novikov operator+(const Novikov& x, const Novikov& y) {
    Novikov r;
    r.precision_ = std::min(x.precision_, y.precision_);
    r.terms_.reserve(x.terms_.size() + y.terms_.size());
    auto ix = x.terms_.begin(), iy = y.terms_.begin();
    while (ix != x.terms_.end() && iy != y.terms_.end()) {
      if (ix->exp < iy->exp)
        r.terms_.push_back(*ix++);
      else if (iy->exp < ix->exp)
        r.terms_.push_back(*iy++);
      else {
        r.terms_.push_back({ix->exp, ix->coeff + iy->coeff});
        ++ix;
        ++iy;
      }
    }
    r.terms_.insert(r.terms_.end(), ix, x.terms_.end());
    r.terms_.insert(r.terms_.end(), iy, y.terms_.end());
    r.normalize();
    return r;
  }

  friend Novikov operator-(const Novikov& x, const Novikov& y) { return x + (-y); }

  friend Novikov operator*(const Novikov& x, const Novikov& y) {
    // Known modulo the weaker of the two val-shifted precisions.  A zero
    // factor contributes its precision as the valuation bound.
    Rational px = x.val().lower_bound() + y.precision_;
    Rational py = y.val().lower_bound() + x.precision_;
    Novikov r;
    r.precision_ = std::min(px, py);
    if (x.is_zero() || y.is_zero()) return r;
    r.terms_.reserve(x.terms_.size() * y.terms_.size());
    for (const auto& tx : x.terms_)
      for (const auto& ty : y.terms_) {
        Rational e = tx.exp + ty.exp;
        if (e >= r.precision_) continue;
        r.terms_.push_back({std::move(e), tx.coeff * ty.coeff});
      }
    std::sort(r.terms_.begin(), r.terms_.end(),
              [](const Term& a, const Term& b) { return a.exp < b.exp; });
    r.merge_sorted();
    return r;
  }

  friend Novikov operator*(const Complex& c, const Novikov& x) {
    Novikov r = x;
    for (auto& t : r.terms_) t.coeff *= c;
    r.normalize();
    return r;
  }
  friend Novikov operator*(const Novikov& x, const Complex& c) { return c * x; }
  friend Novikov operator*(double c, const Novikov& x) { return Complex(c, 0.0) * x; }

  Novikov& operator+=(const Novikov& y) { return *this = *this + y; }
  Novikov& operator-=(const Novikov& y) { return *this = *this - y; }
  Novikov& operator*=(const Novikov& y) { return *this = *this * y; }

  Novikov pow(long k) const;

  // Shift by T^e: multiplies every exponent and the precision.
  Novikov shifted(const Rational& e) const {
    Novikov r = *this;
    r.precision_ += e;
    for (auto& t : r.terms_) t.exp += e;
    return r;
  }

 private:
  void merge_sorted() {
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!merged.empty() && merged.back().exp == t.exp)
        merged.back().coeff += t.coeff;
      else
        merged.push_back(std::move(t));
    }
    terms_ = std::move(merged);
    normalize();
  }

  void normalize() {
    std::vector<Term> kept;
    kept.reserve(terms_.size());
    for (auto& t : terms_) {
      if (t.exp >= precision_) continue;
      if (std::abs(t.coeff) < kCoeffCleanupEps) continue;
      kept.push_back(std::move(t));
    }
    terms_ = std::move(kept);
    for (std::size_t i = 1; i < terms_.size(); ++i)
      if (!(terms_[i - 1].exp < terms_[i].exp))
        throw DomainError("novikov terms not strictly increasing");
  }

  std::vector<Term> terms_;
  Rational precision_;
};

inline Valuation val(const Novikov& x) { return x.val(); }

// x^{-1} by factoring the leading term and Newton reciprocal iteration on
// the unit part.  Result is known modulo T^{p - 2*val(x)}.
inline Novikov invert(const Novikov& x) {
  if (x.is_zero())
    throw ZeroDivision("invert: no term below precision " + to_string(x.precision()));
  const Rational lead_exp = x.leading_exp();
  const Complex lead_coeff = x.leading_coeff();
  const Rational rel = x.precision() - lead_exp;  // relative precision of the unit part

  // unit = x / (c T^e), a series 1 + u with val(u) > 0
  Novikov unit = (Complex(1.0, 0.0) / lead_coeff) * x.shifted(-lead_exp);
  unit = unit.truncated(rel);

  Novikov r = Novikov::one().truncated(rel);
  if (unit.terms().size() > 1) {
    const Novikov two = Novikov(Complex(2.0, 0.0), rel);
    Rational achieved = unit.terms()[1].exp;  // val of u > 0
    while (achieved < rel) {
      r = (r * (two - unit * r)).truncated(rel);
      achieved += achieved;
    }
  }
  return (Complex(1.0, 0.0) / lead_coeff) * r.shifted(-lead_exp);
}

inline Novikov Novikov::pow(long k) const {
  // Exponents stay tiny in practice, so plain repeated multiplication keeps
  // the precision bookkeeping inside operator*.
  if (k == 0) return Novikov(Complex(1.0, 0.0), precision_ - val().lower_bound());
  if (k < 0) return invert(*this).pow(-k);
  Novikov acc = *this;
  for (long i = 1; i < k; ++i) acc = acc * (*this);
  return acc;
}

// exp(x) = sum x^k / k! for val(x) > 0; val 0 result with leading
// coefficient 1.
inline Novikov exp_positive(const Novikov& x) {
  if (!x.val().gt(Rational(0)))
    throw DomainError("exp_positive requires val(x) > 0, got val = " + to_string(x.val()));
  const Rational p = x.precision();
  Novikov result = Novikov::one().truncated(p);
  Novikov term = Novikov::one().truncated(p);
  for (long k = 1;; ++k) {
    term = (term * x) * Complex(1.0 / static_cast<double>(k), 0.0);
    term = term.truncated(p);
    if (term.is_zero()) break;
    result += term;
  }
  return result.truncated(p);
}

// The n monomial n-th roots of c*T^lambda.
inline std::vector<Novikov> nth_roots(Complex c, const Rational& lambda, long n) {
  if (std::abs(c) < kCoeffCleanupEps) throw DomainError("nth_roots of zero");
  if (n <= 0) throw DomainError("nth_roots requires n >= 1");
  const double mod = std::pow(std::abs(c), 1.0 / static_cast<double>(n));
  const double arg = std::arg(c);
  Rational e = lambda / n;
  std::vector<Novikov> roots;
  roots.reserve(static_cast<std::size_t>(n));
  for (long s = 0; s < n; ++s) {
    const double phase = (arg + 2.0 * std::numbers::pi * static_cast<double>(s)) /
                         static_cast<double>(n);
    roots.push_back(Novikov::monomial(std::polar(mod, phase), e));
  }
  return roots;
}

// Same exponent support (exactly) and coefficients within tol.
inline bool approx_equal(const Novikov& x, const Novikov& y,
                         double tol = kCoeffCompareTol) {
  const Novikov d = x - y;
  for (const auto& t : d.terms())
    if (std::abs(t.coeff) > tol) return false;
  return true;
}

}  // namespace syztrop
