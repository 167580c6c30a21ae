#pragma once

#include <span>
#include <vector>

#include "syztrop/laurent.hpp"
#include "syztrop/rational.hpp"

namespace syztrop {

// Min-plus polynomial: finite set of (rational constant, integer exponent
// vector) terms.  Evaluation is exact.
class Tropical {
 public:
  struct Term {
    Rational constant;
    ExpVec exps;
  };

  explicit Tropical(int nvars) : nvars_(nvars) {}

  Tropical(int nvars, std::vector<Term> terms) : nvars_(nvars), terms_(std::move(terms)) {
    for (const auto& t : terms_)
      if (static_cast<int>(t.exps.size()) != nvars_)
        throw DomainError("tropical term arity mismatch");
    for (std::size_t i = 0; i < terms_.size(); ++i)
      for (std::size_t j = i + 1; j < terms_.size(); ++j)
        if (terms_[i].exps == terms_[j].exps)
          throw DomainError("tropical polynomial has duplicate exponent vectors");
    if (terms_.empty()) throw DomainError("tropical polynomial needs at least one term");
  }

  int nvars() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }

 private:
  int nvars_;
  std::vector<Term> terms_;
};

struct TropEval {
  Rational value;
  std::vector<std::size_t> argmin;  // every index attaining the min
};

inline TropEval trop_eval(const Tropical& h, std::span<const Rational> qbar) {
  if (static_cast<int>(qbar.size()) != h.nvars())
    throw DomainError("trop_eval arity mismatch");
  TropEval r;
  bool first = true;
  for (std::size_t i = 0; i < h.terms().size(); ++i) {
    const auto& t = h.terms()[i];
    Rational v = t.constant;
    for (int k = 0; k < h.nvars(); ++k)
      if (t.exps[k] != 0) v += t.exps[k] * qbar[k];
    if (first || v < r.value) {
      r.value = v;
      r.argmin.assign(1, i);
      first = false;
    } else if (v == r.value) {
      r.argmin.push_back(i);
    }
  }
  return r;
}

inline TropEval trop_eval(const Tropical& h, const std::vector<Rational>& qbar) {
  return trop_eval(h, std::span<const Rational>(qbar));
}

// Min attained at least twice, decided exactly.
inline bool on_tropical_hypersurface(const Tropical& h, std::span<const Rational> qbar) {
  return trop_eval(h, qbar).argmin.size() >= 2;
}
inline bool on_tropical_hypersurface(const Tropical& h, const std::vector<Rational>& qbar) {
  return on_tropical_hypersurface(h, std::span<const Rational>(qbar));
}

// Term-wise valuation of the coefficients.
inline Tropical tropicalize(const LaurentPoly& h) {
  std::vector<Tropical::Term> terms;
  terms.reserve(h.size());
  for (const auto& [e, c] : h.terms()) {
    if (c.is_zero())
      throw DomainError("tropicalize: zero coefficient");
    terms.push_back({c.val().value(), e});
  }
  return Tropical(h.nvars(), std::move(terms));
}

// Chamber decomposition of the base B = R^n: the two open chambers, the
// wall components H_k indexed by the unique minimizing term, and the
// discriminant where the wall meets the tropical hypersurface.
enum class ChamberKind { Plus, Minus, Wall, Discriminant };

struct ChamberTag {
  ChamberKind kind;
  std::size_t wall_index = 0;  // 1-based term index, Wall only

  friend bool operator==(const ChamberTag& a, const ChamberTag& b) {
    return a.kind == b.kind && (a.kind != ChamberKind::Wall || a.wall_index == b.wall_index);
  }
};

// Base point q = (qbar, qn).  The first n-1 coordinates are valuations and
// stay rational in every regime; the last one matches the psi-model scalar.
template <typename S>
struct BasePointT {
  std::vector<Rational> qbar;
  S qn;
};
using BasePoint = BasePointT<Rational>;

inline ChamberTag classify_base_point(const Tropical& h_trop, const BasePoint& q) {
  if (q.qn > 0) return {ChamberKind::Plus};
  if (q.qn < 0) return {ChamberKind::Minus};
  const TropEval e = trop_eval(h_trop, q.qbar);
  if (e.argmin.size() >= 2) return {ChamberKind::Discriminant};
  return {ChamberKind::Wall, e.argmin.front() + 1};
}

}  // namespace syztrop
