#pragma once

#include <map>
#include <span>
#include <vector>

#include "syztrop/novikov.hpp"

namespace syztrop {

using ExpVec = std::vector<int>;

// Laurent polynomial in nvars variables with Novikov coefficients.  The
// term map is ordered so iteration (and every serialization built on it)
// is canonical.
class LaurentPoly {
 public:
  explicit LaurentPoly(int nvars) : nvars_(nvars) {}

  int nvars() const { return nvars_; }
  const std::map<ExpVec, Novikov>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const ExpVec& e, const Novikov& c) {
    if (static_cast<int>(e.size()) != nvars_)
      throw DomainError("laurent term arity mismatch");
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  static LaurentPoly monomial(int nvars, const ExpVec& e, const Novikov& c) {
    LaurentPoly p(nvars);
    p.add_term(e, c);
    return p;
  }

  static LaurentPoly constant(int nvars, const Novikov& c) {
    return monomial(nvars, ExpVec(nvars, 0), c);
  }

  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.nvars_ != b.nvars_) throw DomainError("laurent arity mismatch");
    LaurentPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
  }

  friend LaurentPoly operator-(const LaurentPoly& a) {
    LaurentPoly r = a;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }

  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) {
    return a + (-b);
  }

  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.nvars_ != b.nvars_) throw DomainError("laurent arity mismatch");
    LaurentPoly r(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        ExpVec e(a.nvars_);
        for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, ca * cb);
      }
    return r;
  }

  LaurentPoly pow(int k) const {
    if (k < 0) throw DomainError("laurent pow: negative power");
    LaurentPoly acc = constant(nvars_, Novikov::one());
    for (int i = 0; i < k; ++i) acc = acc * (*this);
    return acc;
  }

  // Evaluation at a point of (Lambda^*)^nvars; negative powers go through
  // series inversion.
  Novikov eval(std::span<const Novikov> y) const {
    if (static_cast<int>(y.size()) != nvars_)
      throw DomainError("laurent eval arity mismatch");
    std::vector<Novikov> inv(nvars_);
    std::vector<bool> have_inv(nvars_, false);
    Novikov acc = Novikov::zero(Rational(1000000));  // capped by the summands
    for (const auto& [e, c] : terms_) {
      Novikov t = c;
      for (int i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        if (e[i] > 0) {
          t = t * y[i].pow(e[i]);
        } else {
          if (!have_inv[i]) {
            inv[i] = invert(y[i]);
            have_inv[i] = true;
          }
          t = t * inv[i].pow(-e[i]);
        }
      }
      acc = acc + t;
    }
    return acc;
  }

  // Coefficient-wise comparison: equal exponent support and coefficients
  // within tol.
  friend bool approx_equal(const LaurentPoly& a, const LaurentPoly& b,
                           double tol = kCoeffCompareTol) {
    const LaurentPoly d = a - b;
    for (const auto& [e, c] : d.terms_)
      if (!approx_equal(c, Novikov::zero(c.precision()), tol)) return false;
    return true;
  }

 private:
  int nvars_;
  std::map<ExpVec, Novikov> terms_;
};

// Extends an (n-1)-variable polynomial by a trailing zero exponent.
inline LaurentPoly lift_last(const LaurentPoly& h) {
  LaurentPoly r(h.nvars() + 1);
  for (const auto& [e, c] : h.terms()) {
    ExpVec el = e;
    el.push_back(0);
    r.add_term(el, c);
  }
  return r;
}

// Transport along the wall-crossing substitution of the last variable,
// y_n -> y_n * h(y_1..y_{n-1}), with denominators cleared: returns
// h^K * (p o Phi) where K = max(0, -min y_n-exponent of p).  Comparing two
// potentials composes one side and scales the other by h^K.
struct ClearedComposition {
  LaurentPoly poly;
  int clearing_power;
};

inline ClearedComposition compose_last_with(const LaurentPoly& p, const LaurentPoly& h) {
  if (h.nvars() != p.nvars() - 1)
    throw DomainError("compose_last_with: h must have one variable fewer");
  const int n = p.nvars();
  int min_e = 0;
  for (const auto& [e, c] : p.terms()) min_e = std::min(min_e, e[n - 1]);
  const int clear = -min_e;
  const LaurentPoly h_lift = lift_last(h);
  LaurentPoly r(n);
  for (const auto& [e, c] : p.terms())
    r = r + LaurentPoly::monomial(n, e, c) * h_lift.pow(e[n - 1] + clear);
  return {r, clear};
}

}  // namespace syztrop
