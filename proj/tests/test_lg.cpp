#include <catch2/catch.hpp>

#include "syztrop/lg.hpp"

using namespace syztrop;

namespace {

Novikov T(const Rational& e) { return Novikov::monomial({1, 0}, e); }

CompactificationSpec cpn(int n, Rational E = Rational(1)) {
  CompactificationSpec s;
  s.family = CompactificationSpec::Family::CPn;
  s.n = n;
  s.E1 = std::move(E);
  return s;
}

CompactificationSpec p1xp1(Rational E1, Rational E2) {
  CompactificationSpec s;
  s.family = CompactificationSpec::Family::CPmxCPnm;
  s.n = 2;
  s.m = 1;
  s.E1 = std::move(E1);
  s.E2 = std::move(E2);
  return s;
}

}  // namespace

TEST_CASE("log derivative") {
  LaurentPoly w(2);
  w.add_term({1, 0}, Novikov::one());           // y1
  w.add_term({0, 0}, Novikov(Complex(5, 0)));   // constant
  w.add_term({2, -1}, Novikov(Complex(1, 0)));  // y1^2 y2^{-1}

  const LaurentPoly d1 = log_derivative(w, {1, 0});
  REQUIRE(d1.size() == 2);  // constant drops
  REQUIRE(approx_equal(d1.terms().at({1, 0}), Novikov::one()));
  REQUIRE(approx_equal(d1.terms().at({2, -1}), Novikov(Complex(2, 0))));

  REQUIRE(log_derivative(w, {0, 0}).empty());
}

TEST_CASE("superpotentials of the standard families") {
  // ambient C^n
  CompactificationSpec cn;
  cn.family = CompactificationSpec::Family::Cn;
  cn.n = 3;
  const LaurentPoly wp = build_superpotential(cn, Chart::Plus);
  REQUIRE(wp.size() == 3);  // y3(1 + y1 + y2)
  REQUIRE(wp.terms().count({0, 0, 1}) == 1);
  REQUIRE(wp.terms().count({1, 0, 1}) == 1);
  REQUIRE(wp.terms().count({0, 1, 1}) == 1);
  const LaurentPoly wm = build_superpotential(cn, Chart::Minus);
  REQUIRE(wm.size() == 1);
  REQUIRE(wm.terms().count({0, 0, 1}) == 1);

  // CP^n on the variety: x1 + T^E x0^n / (y1...y_{n-1})
  const LaurentPoly wy = build_superpotential(cpn(3), Chart::Y);
  REQUIRE(wy.size() == 2);
  REQUIRE(wy.terms().count({0, 1, 0, 0}) == 1);
  const auto corr = wy.terms().find({3, 0, -1, -1});
  REQUIRE(corr != wy.terms().end());
  REQUIRE(corr->second.leading_exp() == 1);

  // CP^1 x CP^1: x1 + T^{E1} x0 / y + T^{E2} x0
  const LaurentPoly wprod =
      build_superpotential(p1xp1(rational(1), rational(3, 2)), Chart::Y);
  REQUIRE(wprod.size() == 3);
  REQUIRE(wprod.terms().count({0, 1, 0}) == 1);
  const auto t1 = wprod.terms().find({1, 0, -1});
  REQUIRE(t1 != wprod.terms().end());
  REQUIRE(t1->second.leading_exp() == 1);
  const auto t2 = wprod.terms().find({1, 0, 0});
  REQUIRE(t2 != wprod.terms().end());
  REQUIRE(t2->second.leading_exp() == rational(3, 2));
}

TEST_CASE("appendix log-derivative display for CP^n") {
  // D_n W_plus = -n T^E/(y1..y_{n-1} y_n^n) + y_n(1 + y1 + ... + y_{n-1})
  const int n = 3;
  const LaurentPoly wp = build_superpotential(cpn(n), Chart::Plus);
  ExpVec dir(n, 0);
  dir[n - 1] = 1;
  const LaurentPoly dn = log_derivative(wp, dir);
  const auto frac = dn.terms().find({-1, -1, -3});
  REQUIRE(frac != dn.terms().end());
  REQUIRE(approx_equal(frac->second, Complex(-3.0, 0.0) * T(rational(1))));
  REQUIRE(dn.terms().count({0, 0, 1}) == 1);
  REQUIRE(dn.terms().count({1, 0, 1}) == 1);
  REQUIRE(dn.terms().count({0, 1, 1}) == 1);
}

TEST_CASE("wall crossing transport") {
  CompactificationSpec cn;
  cn.family = CompactificationSpec::Family::Cn;
  for (int n : {2, 3, 4}) {
    cn.n = n;
    const LaurentPoly h = detail::cn_h(n);
    REQUIRE(wall_crossing_check(build_superpotential(cn, Chart::Plus),
                                build_superpotential(cn, Chart::Minus), h));
  }
  for (int n : {2, 3}) {
    const LaurentPoly h = detail::cn_h(n);
    REQUIRE(wall_crossing_check(build_superpotential(cpn(n), Chart::Plus),
                                build_superpotential(cpn(n), Chart::Minus), h));
  }
  {
    const auto spec = p1xp1(rational(1), rational(2));
    REQUIRE(wall_crossing_check(build_superpotential(spec, Chart::Plus),
                                build_superpotential(spec, Chart::Minus),
                                detail::cn_h(2)));
  }

  // a perturbed minus potential fails
  LaurentPoly bad = build_superpotential(cpn(2), Chart::Minus);
  bad.add_term(ExpVec(2, 0), T(rational(1)));
  REQUIRE_FALSE(wall_crossing_check(build_superpotential(cpn(2), Chart::Plus), bad,
                                    detail::cn_h(2)));
}

TEST_CASE("toy solver: W = y + T/y") {
  LaurentPoly w(1);
  w.add_term({1}, Novikov::one());
  w.add_term({-1}, T(rational(1)));

  const auto points = solve_critical_system(w, Rational(20));
  REQUIRE(points.size() == 2);
  std::vector<Novikov> values;
  for (const auto& p : points) {
    REQUIRE(p.coords.size() == 1);
    REQUIRE(p.coords[0].val().value() == rational(1, 2));
    REQUIRE(p.residual.geq(Rational(20)));
    values.push_back(p.value);
  }
  const std::vector<Novikov> expected{Complex(2, 0) * T(rational(1, 2)),
                                      Complex(-2, 0) * T(rational(1, 2))};
  REQUIRE(values_match_multiset(values, expected));
}

TEST_CASE("CP^2 critical points in both charts") {
  const CompactificationSpec spec = cpn(2);
  const std::vector<Novikov> eigen = c1_eigenvalues(spec);
  REQUIRE(eigen.size() == 3);

  const auto plus = solve_critical_points(spec, Chart::Plus, Rational(20));
  REQUIRE(plus.size() == 3);
  std::vector<Novikov> plus_values;
  for (const auto& p : plus) {
    // y1 = 1, y2 = T^{1/3} zeta
    REQUIRE(p.coords[0].val().value() == 0);
    REQUIRE(std::abs(p.coords[0].leading_coeff() - Complex(1, 0)) < 1e-9);
    REQUIRE(p.coords[1].val().value() == rational(1, 3));
    REQUIRE(p.residual.geq(Rational(20)));
    plus_values.push_back(p.value);
  }
  REQUIRE(values_match_multiset(plus_values, eigen));

  const auto minus = solve_critical_points(spec, Chart::Minus, Rational(20));
  REQUIRE(minus.size() == 3);
  std::vector<Novikov> minus_values;
  for (const auto& p : minus) {
    // y_n = n T^{E/(n+1)} e^{2 pi i s/(n+1)} with n = 2
    REQUIRE(p.coords[1].val().value() == rational(1, 3));
    REQUIRE(std::abs(std::abs(p.coords[1].leading_coeff()) - 2.0) < 1e-9);
    minus_values.push_back(p.value);
  }
  REQUIRE(values_match_multiset(minus_values, eigen));
}

TEST_CASE("CP^n critical points on the variety") {
  const CompactificationSpec spec = cpn(2);
  const auto points = solve_critical_points(spec, Chart::Y, Rational(20));
  REQUIRE(points.size() == 3);
  for (const auto& p : points) {
    REQUIRE(p.coords.size() == 3);
    // x0 = T^{-1/3} e^{-2 pi i s/3}, x1 = 2 T^{1/3} e^{2 pi i s/3}, y = 1
    REQUIRE(p.coords[0].val().value() == rational(-1, 3));
    REQUIRE(p.coords[1].val().value() == rational(1, 3));
    REQUIRE(std::abs(std::abs(p.coords[1].leading_coeff()) - 2.0) < 1e-9);
    REQUIRE(p.coords[2].val().value() == 0);
    REQUIRE(std::abs(p.coords[2].leading_coeff() - Complex(1, 0)) < 1e-9);
    // x0 x1 = 1 + y on the nose
    const Novikov lhs = p.coords[0] * p.coords[1];
    const Novikov rhs = Novikov::one() + p.coords[2];
    REQUIRE(approx_equal(lhs, rhs));
  }
}

TEST_CASE("base points of the CP^2 critical fiber") {
  const auto points = solve_critical_points(cpn(2), Chart::Y, Rational(20));
  const ExactPLPsi<Rational> psi;
  const Tropical h_trop = tropicalize(detail::cn_h(2));
  const auto bases = critical_base_points(points, psi, h_trop);
  REQUIRE(bases.size() == 3);
  for (const auto& b : bases) {
    REQUIRE(b.qbar == std::vector<Rational>{Rational(0)});
    REQUIRE_FALSE(b.x1_val.is_infinite());
    REQUIRE(b.x1_val.value() == rational(1, 3));  // psi(q) = E/(n+1)
    // all three sit in the same fiber; under this model it is Chekanov-side
    REQUIRE(b.qn.has_value());
    REQUIRE(*b.qn == *bases.front().qn);
    REQUIRE(*b.qn < 0);
    REQUIRE(b.on_hypersurface);
  }
}

TEST_CASE("product family critical points") {
  for (const auto& [E1, E2] : std::vector<std::pair<Rational, Rational>>{
           {Rational(1), Rational(1)}, {Rational(1), rational(3, 2)}}) {
    const CompactificationSpec spec = p1xp1(E1, E2);
    const auto points = solve_critical_points(spec, Chart::Y, Rational(20));
    REQUIRE(points.size() == 4);

    std::vector<Novikov> values;
    for (const auto& p : points) {
      // x0 = +-T^{-E2/2}, y1 = +-T^{(E1-E2)/2}
      REQUIRE(p.coords[0].val().value() == -E2 / 2);
      REQUIRE(std::abs(std::abs(p.coords[0].leading_coeff()) - 1.0) < 1e-9);
      REQUIRE(p.coords[2].val().value() == (E1 - E2) / 2);
      REQUIRE(std::abs(std::abs(p.coords[2].leading_coeff()) - 1.0) < 1e-9);
      values.push_back(p.value);
    }
    REQUIRE(values_match_multiset(values, c1_eigenvalues(spec)));

    // base point: q1 = (E1 - E2)/2 exactly; at E1 = E2 two points have
    // x1 = 0 and sit on the singular fiber
    const ExactPLPsi<Rational> psi;
    const auto bases = critical_base_points(points, psi, tropicalize(detail::cn_h(2)));
    int singular = 0;
    for (const auto& b : bases) {
      REQUIRE(b.qbar[0] == (E1 - E2) / 2);
      if (!b.qn.has_value()) ++singular;
    }
    REQUIRE(singular == (E1 == E2 ? 2 : 0));
  }
}

TEST_CASE("c1 eigenvalue tables") {
  // CP^1: +-2 T^{E/2}
  const auto line = c1_eigenvalues(cpn(1, rational(4, 3)));
  REQUIRE(line.size() == 2);
  REQUIRE(values_match_multiset(line, {Complex(2, 0) * T(rational(2, 3)),
                                       Complex(-2, 0) * T(rational(2, 3))}));

  // CP^1 x CP^1 at E1 = E2 = 1: 2(+-1 +-1) T^{1/2}
  const auto prod = c1_eigenvalues(p1xp1(Rational(1), Rational(1)));
  REQUIRE(prod.size() == 4);
  REQUIRE(values_match_multiset(
      prod, {Complex(4, 0) * T(rational(1, 2)), Complex(-4, 0) * T(rational(1, 2)),
             Novikov::zero(), Novikov::zero()}));

  CompactificationSpec cn;
  cn.family = CompactificationSpec::Family::Cn;
  REQUIRE_THROWS_AS(c1_eigenvalues(cn), UnsupportedFamily);
}

TEST_CASE("newton lift doubles the valuation defect") {
  LaurentPoly w(1);
  w.add_term({1}, Novikov::one());
  w.add_term({-1}, T(rational(1)));

  // seed = T^{1/2} (1 + 0.4 T^{1/8}): defect starts at 1/8 and doubles
  const Novikov seed = Novikov::from_terms(
      {{rational(1, 2), {1, 0}}, {rational(5, 8), {0.4, 0}}}, rational(45));
  const auto lift = newton_lift_from_seed(w, {seed}, Rational(20));
  REQUIRE(lift.converged);
  REQUIRE(lift.defects.size() >= 3);
  for (std::size_t i = 0; i + 1 < lift.defects.size(); ++i) {
    REQUIRE(lift.defects[i + 1] >= std::min<Rational>(2 * lift.defects[i], Rational(20)));
  }
}

TEST_CASE("sphere energies") {
  ToricCY conifold;
  conifold.rays = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, -1, 1}};
  conifold.basis_cone = {1, 2, 3};
  conifold.lambdas = {Rational(0), Rational(0), Rational(0), rational(5, 7)};
  REQUIRE(sphere_energy(validate(conifold), 1) == rational(5, 7));

  conifold.lambdas[3] = Rational(0);
  REQUIRE(sphere_energy(validate(conifold), 1) == 0);
  REQUIRE_THROWS_AS(sphere_energy(validate(conifold), 2), IndexOutOfRange);

  // mixed-degree sample: the ray (2,0,-1) = 2 v1 - v3 with lambda = 2
  // carries sphere energy 2 - (2*0 - 157/50)
  LaurentPoly h(2);
  h.add_term({1, 0}, Novikov::one());
  h.add_term({0, 1}, T(rational(-1)));
  h.add_term({0, 0}, T(parse_rational("3.14")));
  h.add_term({2, 0}, T(rational(2)));
  h.add_term({1, 1}, Novikov::one());
  h.add_term({0, 2}, T(rational(2)));
  const ValidatedToric v = validate(syz_converse(h).data);
  int a = -1;
  for (int i = v.n; i < v.n + v.r; ++i)
    if (v.rays[i] == std::vector<long>{2, 0, -1}) a = i - v.n + 1;
  REQUIRE(a >= 1);
  REQUIRE(sphere_energy(v, a) == Rational(2) + parse_rational("3.14"));
}

TEST_CASE("solver rejects degenerate potentials") {
  LaurentPoly w(2);
  w.add_term({1, 0}, Novikov::one());  // independent of y2
  REQUIRE_THROWS_AS(solve_critical_system(w, Rational(10)), DomainError);
}
