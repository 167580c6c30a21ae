#pragma once

#include <functional>
#include <memory>
#include <utility>

#include "syztrop/tropical.hpp"

namespace syztrop {

// The two numeric regimes: exact rationals for verification, doubles for
// smooth models and figure export.
template <typename S>
struct ScalarOps;

template <>
struct ScalarOps<Rational> {
  static Rational from(const Rational& r) { return r; }
  static Rational rationalize(const Rational& s) { return s; }
  static bool eq(const Rational& a, const Rational& b, double) { return a == b; }
};

template <>
struct ScalarOps<double> {
  static double from(const Rational& r) { return to_double(r); }
  static Rational rationalize(double s) { return Rational(s); }  // exact binary value
  static bool eq(double a, double b, double tol) { return std::abs(a - b) <= tol; }
};

// Monotone model of the disk-area function: psi(qbar, .) is strictly
// increasing with range (0, inf), psi0(qbar) = psi(qbar, 0) > 0, and
// psi_inverse solves psi(qbar, qn) = c for qn.
template <typename S>
class PsiModel {
 public:
  virtual ~PsiModel() = default;
  virtual S psi(const std::vector<Rational>& qbar, const S& qn) const = 0;
  virtual S psi0(const std::vector<Rational>& qbar) const = 0;
  virtual S psi_inverse(const std::vector<Rational>& qbar, const S& c) const = 0;
};

using Psi0Fn = std::function<Rational(const std::vector<Rational>&)>;

inline Psi0Fn constant_psi0(Rational value = Rational(1)) {
  return [value](const std::vector<Rational>&) { return value; };
}

// Exact piecewise-rational model:
//   psi = psi0 * (1 + qn)   for qn >= 0
//   psi = psi0 / (1 - qn)   for qn <  0
// Strictly increasing with range (0, inf), and invertible in exact
// rational arithmetic.
template <typename S>
class ExactPLPsi final : public PsiModel<S> {
 public:
  explicit ExactPLPsi(Psi0Fn psi0 = constant_psi0()) : psi0_(std::move(psi0)) {}

  S psi(const std::vector<Rational>& qbar, const S& qn) const override {
    const S p0 = psi0(qbar);
    if (qn >= S(0)) return p0 * (S(1) + qn);
    return p0 / (S(1) - qn);
  }

  S psi0(const std::vector<Rational>& qbar) const override {
    const Rational v = psi0_(qbar);
    if (!(v > 0)) throw DomainError("psi0 must be positive");
    return ScalarOps<S>::from(v);
  }

  S psi_inverse(const std::vector<Rational>& qbar, const S& c) const override {
    if (!(c > S(0))) throw ModelNotInvertible("psi takes values in (0, inf)");
    const S p0 = psi0(qbar);
    if (c >= p0) return c / p0 - S(1);
    return S(1) - p0 / c;
  }

 private:
  Psi0Fn psi0_;
};

// Smooth model for figure export: psi = log(1 + e^{qn}) + psi0 - log 2.
class SoftplusPsi final : public PsiModel<double> {
 public:
  explicit SoftplusPsi(Psi0Fn psi0 = constant_psi0()) : psi0_(std::move(psi0)) {}

  double psi(const std::vector<Rational>& qbar, const double& qn) const override {
    return std::log1p(std::exp(qn)) + psi0(qbar) - std::numbers::ln2;
  }

  double psi0(const std::vector<Rational>& qbar) const override {
    const double v = to_double(psi0_(qbar));
    if (!(v > 0)) throw DomainError("psi0 must be positive");
    return v;
  }

  double psi_inverse(const std::vector<Rational>& qbar, const double& c) const override {
    const double arg = std::exp(c - psi0(qbar) + std::numbers::ln2) - 1.0;
    if (!(arg > 0)) throw ModelNotInvertible("value below the softplus range");
    return std::log(arg);
  }

 private:
  Psi0Fn psi0_;
};

template <typename S>
struct ImagePointT {
  S u0, u1;
  std::vector<Rational> qbar;
};
using ImagePoint = ImagePointT<Rational>;

// Corner A(qbar) = (h_trop(qbar) - psi0(qbar), psi0(qbar)) of the broken
// line over qbar.
template <typename S>
std::pair<S, S> corner_point(const PsiModel<S>& psi, const Tropical& h_trop,
                             const std::vector<Rational>& qbar) {
  const S p0 = psi.psi0(qbar);
  const S ht = ScalarOps<S>::from(trop_eval(h_trop, qbar).value);
  return {ht - p0, p0};
}

// theta_0 = min{-psi(q), -psi0(qbar)} + h_trop(qbar)
// theta_1 = min{ psi(q),  psi0(qbar)}
template <typename S>
std::pair<S, S> theta(const BasePointT<S>& q, const PsiModel<S>& psi,
                      const Tropical& h_trop) {
  const S p = psi.psi(q.qbar, q.qn);
  const S p0 = psi.psi0(q.qbar);
  const S ht = ScalarOps<S>::from(trop_eval(h_trop, q.qbar).value);
  return {std::min<S>(-p, -p0) + ht, std::min<S>(p, p0)};
}

template <typename S>
ImagePointT<S> j_embed(const BasePointT<S>& q, const PsiModel<S>& psi,
                       const Tropical& h_trop) {
  auto [t0, t1] = theta(q, psi, h_trop);
  return {t0, t1, q.qbar};
}

// Inverse of j on its image.  The point must lie on one of the two legs of
// the broken line over qbar, with u1 > 0; the corner maps to qn = 0.
template <typename S>
BasePointT<S> j_invert(const ImagePointT<S>& p, const PsiModel<S>& psi,
                       const Tropical& h_trop, double tol = 1e-12) {
  if (!(p.u1 > S(0))) throw NotOnImage("j image requires u1 > 0");
  const auto [a0, a1] = corner_point(psi, h_trop, p.qbar);
  const S ht = ScalarOps<S>::from(trop_eval(h_trop, p.qbar).value);
  const bool on_u0_leg = ScalarOps<S>::eq(p.u0, a0, tol);
  const bool on_u1_leg = ScalarOps<S>::eq(p.u1, a1, tol);
  if (on_u0_leg && on_u1_leg) return {p.qbar, S(0)};
  if (on_u1_leg && p.u0 < a0) return {p.qbar, psi.psi_inverse(p.qbar, ht - p.u0)};
  if (on_u0_leg && p.u1 < a1) return {p.qbar, psi.psi_inverse(p.qbar, p.u1)};
  throw NotOnImage("point is off the broken-line surface");
}

// One slice of the image surface: c is the area parameter along the line.
template <typename S>
std::pair<S, S> broken_line(const std::vector<Rational>& qbar, const PsiModel<S>& psi,
                            const Tropical& h_trop, const S& c) {
  const S p0 = psi.psi0(qbar);
  const S ht = ScalarOps<S>::from(trop_eval(h_trop, qbar).value);
  return {ht + std::min<S>(-c, -p0), std::min<S>(c, p0)};
}

// Point of the variety x0 x1 = h(y).
struct VarietyPoint {
  Novikov x0, x1;
  std::vector<Novikov> y;
};

enum class FPointClass {
  SmoothOffHypersurface,  // valuations off the tropical hypersurface
  SmoothX0Dominant,       // on it, val(x0) below the corner level
  SmoothX1Dominant,       // on it, val(x1) below the corner level
  Singular                // both valuations at or above the corner
};

inline bool is_smooth(FPointClass c) { return c != FPointClass::Singular; }

enum class SingularFiberClass { MaurerCartan, Extra };

// The dual fibration data: defining polynomial, its tropicalization, and a
// psi model.  F maps variety points into R^{n+1}; f = j^{-1} o F maps the
// domain val(x1) > 0 back to the base.
template <typename S>
class VarietyFibration {
 public:
  VarietyFibration(LaurentPoly h, std::shared_ptr<const PsiModel<S>> psi,
                   double variety_tol = 1e-9)
      : h_(std::move(h)),
        h_trop_(tropicalize(h_)),
        psi_(std::move(psi)),
        variety_tol_(variety_tol) {}

  const LaurentPoly& h() const { return h_; }
  const Tropical& h_trop() const { return h_trop_; }
  const PsiModel<S>& psi() const { return *psi_; }
  int base_dim() const { return h_.nvars() + 1; }

  std::vector<Rational> valuations(const VarietyPoint& z) const {
    std::vector<Rational> v;
    v.reserve(z.y.size());
    for (std::size_t k = 0; k < z.y.size(); ++k) {
      if (z.y[k].is_zero())
        throw ZeroCoordinate("y_" + std::to_string(k + 1) + " vanishes at working precision");
      v.push_back(z.y[k].val().value());
    }
    return v;
  }

  void check_on_variety(const VarietyPoint& z) const {
    if (static_cast<int>(z.y.size()) != h_.nvars())
      throw DomainError("variety point arity mismatch");
    const Novikov residual = z.x0 * z.x1 - h_.eval(z.y);
    if (!approx_equal(residual, Novikov::zero(residual.precision()), variety_tol_))
      throw NotOnVariety("x0*x1 - h(y) has val " + to_string(residual.val()));
  }

  ImagePointT<S> F(const VarietyPoint& z) const {
    const std::vector<Rational> v = valuations(z);
    check_on_variety(z);
    const auto [a0, a1] = corner_point(*psi_, h_trop_, v);
    S u0 = a0, u1 = a1;
    if (!z.x0.val().is_infinite()) u0 = std::min<S>(ScalarOps<S>::from(z.x0.val().value()), a0);
    if (!z.x1.val().is_infinite()) u1 = std::min<S>(ScalarOps<S>::from(z.x1.val().value()), a1);
    return {u0, u1, v};
  }

  FPointClass classify(const VarietyPoint& z) const {
    const std::vector<Rational> v = valuations(z);
    check_on_variety(z);
    if (!on_tropical_hypersurface(h_trop_, v)) return FPointClass::SmoothOffHypersurface;
    const auto [a0, a1] = corner_point(*psi_, h_trop_, v);
    const Valuation v0 = z.x0.val(), v1 = z.x1.val();
    if (!v0.is_infinite() && ScalarOps<S>::from(v0.value()) < a0)
      return FPointClass::SmoothX0Dominant;
    if (!v1.is_infinite() && ScalarOps<S>::from(v1.value()) < a1)
      return FPointClass::SmoothX1Dominant;
    return FPointClass::Singular;
  }

  BasePointT<S> f(const VarietyPoint& z) const {
    if (!z.x1.val().gt(Rational(0)))
      throw NotInDomain("f is defined where val(x1) > 0, got " + to_string(z.x1.val()));
    return j_invert(F(z), *psi_, h_trop_);
  }

  // n = 2 dual singular fiber over the origin: substituting
  // z0 = T^{psi0} x0, z1 = T^{-psi0} x1 lands in Lambda_0 x Lambda_0, and the
  // two components are told apart by val(1 + y).
  SingularFiberClass classify_singular_fiber_n2(const VarietyPoint& z) const {
    if (h_.nvars() != 1)
      throw DomainError("singular fiber classification is for n = 2");
    const std::vector<Rational> v = valuations(z);
    check_on_variety(z);
    if (v.front() != 0) throw NotOnSingularFiber("val(y) must be 0");
    if (on_tropical_hypersurface(h_trop_, v) == false)
      throw NotOnSingularFiber("base point is off the tropical hypersurface");
    const auto [a0, a1] = corner_point(*psi_, h_trop_, v);
    if (!z.x0.val().geq(rational_of(a0)) || !z.x1.val().geq(rational_of(a1)))
      throw NotOnSingularFiber("point sits over a smooth base point");
    const Valuation w = (Novikov::one() + z.y.front()).val();
    return w.gt(Rational(0)) ? SingularFiberClass::MaurerCartan : SingularFiberClass::Extra;
  }

 private:
  static Rational rational_of(const Rational& r) { return r; }
  static Rational rational_of(double) {
    throw DomainError("singular fiber classification needs the exact model");
  }

  LaurentPoly h_;
  Tropical h_trop_;
  std::shared_ptr<const PsiModel<S>> psi_;
  double variety_tol_;
};

}  // namespace syztrop
