#include <catch2/catch.hpp>

#include "syztrop/toric.hpp"

using namespace syztrop;

namespace {

ToricCY resolved_conifold(const Rational& lambda) {
  ToricCY d;
  d.rays = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, -1, 1}};
  d.basis_cone = {1, 2, 3};
  d.lambdas = {Rational(0), Rational(0), Rational(0), lambda};
  return d;
}

ToricCY kp2(const Rational& lambda4) {
  ToricCY d;
  d.rays = {{1, 0, 1}, {0, 1, 1}, {-1, -1, 1}, {0, 0, 1}};
  d.basis_cone = {1, 2, 4};
  d.lambdas = {Rational(0), Rational(0), lambda4, Rational(0)};
  return d;
}

}  // namespace

TEST_CASE("validate standard C^n") {
  for (int n = 2; n <= 4; ++n) {
    const ValidatedToric v = validate(standard_cn(n));
    REQUIRE(v.n == n);
    REQUIRE(v.r == 0);
    REQUIRE(v.k.empty());
  }
}

TEST_CASE("validate resolved conifold") {
  const ValidatedToric v = validate(resolved_conifold(rational(1)));
  REQUIRE(v.n == 3);
  REQUIRE(v.r == 1);
  REQUIRE(v.k == std::vector<std::vector<long>>{{1, -1, 1}});
}

TEST_CASE("validate rejects bad data") {
  // non-unimodular basis
  ToricCY bad;
  bad.rays = {{2, 0}, {0, 1}};
  bad.basis_cone = {1, 2};
  bad.lambdas = {Rational(0), Rational(0)};
  REQUIRE_THROWS_AS(validate(bad), NotSmooth);

  // v4 = (1,1,1): <m0, v4> = 3
  ToricCY cy = resolved_conifold(Rational(0));
  cy.rays[3] = {1, 1, 1};
  REQUIRE_THROWS_AS(validate(cy), NotCalabiYau);

  // delta with val <= 0
  ToricCY bd = resolved_conifold(Rational(0));
  bd.deltas[4] = Novikov::one();
  REQUIRE_THROWS_AS(validate(bd), BadDelta);

  // delta with val > 0 passes validation
  ToricCY gd = resolved_conifold(Rational(0));
  gd.deltas[4] = Novikov::monomial({1, 0}, rational(1, 2));
  REQUIRE_NOTHROW(validate(gd));
}

TEST_CASE("build_h for the standard families") {
  // C^n: h = 1 + y_1 + ... + y_{n-1}
  const LaurentPoly h3 = build_h(validate(standard_cn(3)));
  REQUIRE(h3.size() == 3);
  for (const auto& [e, c] : h3.terms()) {
    REQUIRE(approx_equal(c, Novikov::one()));
    int deg = 0;
    for (int x : e) deg += x;
    REQUIRE((deg == 0 || deg == 1));
  }

  // conifold: h = 1 + y1 + y2 + T^lambda y1 y2^{-1}
  const LaurentPoly hc = build_h(validate(resolved_conifold(rational(3, 2))));
  REQUIRE(hc.size() == 4);
  const auto it = hc.terms().find(ExpVec{1, -1});
  REQUIRE(it != hc.terms().end());
  REQUIRE(approx_equal(it->second, Novikov::monomial({1, 0}, rational(3, 2))));
}

TEST_CASE("build_h_trop equals tropicalize(build_h)") {
  for (const ToricCY& d : {standard_cn(2), standard_cn(4), resolved_conifold(rational(2))}) {
    const ValidatedToric v = validate(d);
    const Tropical a = build_h_trop(v);
    const Tropical b = tropicalize(build_h(v));
    REQUIRE(a.terms().size() == b.terms().size());
    for (const auto& ta : a.terms()) {
      bool found = false;
      for (const auto& tb : b.terms())
        if (ta.exps == tb.exps && ta.constant == tb.constant) found = true;
      REQUIRE(found);
    }
  }
}

TEST_CASE("exact simplex") {
  // max x + y subject to x <= 2, y <= 3, x + y <= 4
  {
    const LpResult r = solve_lp({{Rational(1), Rational(0)},
                                 {Rational(0), Rational(1)},
                                 {Rational(1), Rational(1)}},
                                {Rational(2), Rational(3), Rational(4)},
                                {Rational(1), Rational(1)});
    REQUIRE(r.status == LpStatus::Optimal);
    REQUIRE(r.value == 4);
  }
  // unbounded: max x subject to x - y <= 1
  {
    const LpResult r = solve_lp({{Rational(1), Rational(-1)}}, {Rational(1)},
                                {Rational(1), Rational(0)});
    REQUIRE(r.status == LpStatus::Unbounded);
  }
  // infeasible: x <= -1 with x >= 0
  {
    const LpResult r = solve_lp({{Rational(1)}}, {Rational(-1)}, {Rational(1)});
    REQUIRE(r.status == LpStatus::Infeasible);
  }
  // phase-1 start: x >= 1 encoded as -x <= -1, maximize -x
  {
    const LpResult r = solve_lp({{Rational(-1)}}, {Rational(-1)}, {Rational(-1)});
    REQUIRE(r.status == LpStatus::Optimal);
    REQUIRE(r.value == -1);
    REQUIRE(r.x[0] == 1);
  }
}

TEST_CASE("compact zero section of a line bundle over P^1") {
  // rays (1,1), (0,1), (-1,1): the (0,1) divisor is the compact section
  ToricCY d;
  d.rays = {{1, 1}, {0, 1}, {-1, 1}};
  d.basis_cone = {1, 2};
  d.lambdas = {Rational(0), Rational(0), Rational(1)};
  const ValidatedToric v = validate(d);
  REQUIRE(v.k == std::vector<std::vector<long>>{{-1, 2}});
  // after reordering the (0,1) ray is the second basis ray
  REQUIRE(detect_compact_divisors(v) == std::set<int>{2});
}

TEST_CASE("compact divisor detection") {
  REQUIRE(detect_compact_divisors(validate(standard_cn(3))).empty());
  REQUIRE(detect_compact_divisors(validate(resolved_conifold(rational(1)))).empty());

  // total space of the canonical bundle over P^2: the interior ray is the
  // n-th basis ray after reordering, so it is flagged as ray 3
  const ValidatedToric v = validate(kp2(rational(1)));
  const auto compact = detect_compact_divisors(v);
  REQUIRE(compact == std::set<int>{3});
  REQUIRE(v.rays[2] == std::vector<long>{0, 0, 1});
}

TEST_CASE("build_h demands deltas on compact divisors") {
  const ValidatedToric v = validate(kp2(rational(1)));
  REQUIRE_THROWS_AS(build_h(v), CompactDivisorWithoutDelta);

  ToricCY with_delta = kp2(rational(1));
  with_delta.deltas[4] = Novikov::monomial({1, 0}, rational(1));
  REQUIRE_NOTHROW(build_h(validate(with_delta)));

  // nonzero delta on a non-compact divisor is rejected by default
  ToricCY wrong = resolved_conifold(rational(1));
  wrong.deltas[4] = Novikov::monomial({1, 0}, rational(1));
  REQUIRE_THROWS_AS(build_h(validate(wrong)), BadDelta);
  BuildHOptions opts;
  opts.allow_delta_on_noncompact = true;
  REQUIRE_NOTHROW(build_h(validate(wrong), opts));
}

TEST_CASE("syz converse on C^n") {
  for (int n = 2; n <= 4; ++n) {
    const LaurentPoly h = build_h(validate(standard_cn(n)));
    const ConverseResult res = syz_converse(h);
    const ValidatedToric v = validate(res.data);
    REQUIRE(v.n == n);
    REQUIRE(v.r == 0);
    // P is the first quadrant: inequalities m_i >= 0 with unit normals
    for (const auto& ineq : res.polytope.inequalities) {
      REQUIRE(ineq.constant == 0);
      long sum = 0;
      for (long x : ineq.normal) {
        REQUIRE((x == 0 || x == 1));
        sum += x;
      }
      REQUIRE(sum == 1);
    }
  }
}

TEST_CASE("syz converse on the mixed-degree sample") {
  LaurentPoly h(2);
  h.add_term({1, 0}, Novikov::one());
  h.add_term({0, 1}, Novikov::monomial({1, 0}, rational(-1)));
  h.add_term({0, 0}, Novikov::monomial({1, 0}, parse_rational("3.14")));
  h.add_term({2, 0}, Novikov::monomial({1, 0}, rational(2)));
  h.add_term({1, 1}, Novikov::one());
  h.add_term({0, 2}, Novikov::monomial({1, 0}, rational(2)));

  const ConverseResult res = syz_converse(h);
  const std::vector<std::vector<long>> expected_rays = {
      {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 0, -1}, {1, 1, -1}, {0, 2, -1}};
  const std::vector<Rational> expected_lambdas = {
      Rational(0), Rational(-1), rational(157, 50), Rational(2), Rational(0), Rational(2)};

  REQUIRE(res.data.rays.size() == 6);
  for (std::size_t i = 0; i < expected_rays.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < res.data.rays.size(); ++j)
      if (res.data.rays[j] == expected_rays[i] && res.data.lambdas[j] == expected_lambdas[i])
        found = true;
    REQUIRE(found);
  }

  // no compact divisor in this fan
  const ValidatedToric v = validate(res.data);
  REQUIRE(detect_compact_divisors(v).empty());

  // round trip
  const LaurentPoly h2 = build_h(v);
  REQUIRE(approx_equal(h, h2));
}

TEST_CASE("syz converse rejects degenerate input") {
  LaurentPoly single(2);
  single.add_term({1, 0}, Novikov::one());
  REQUIRE_THROWS_AS(syz_converse(single), DegenerateInput);

  LaurentPoly no_const(1);
  no_const.add_term({1}, Novikov::one());
  no_const.add_term({2}, Novikov::one());
  REQUIRE_THROWS_AS(syz_converse(no_const), DegenerateInput);
}

TEST_CASE("round trip through build_h and syz_converse") {
  const ToricCY orig = resolved_conifold(rational(5, 4));
  const ValidatedToric v = validate(orig);
  const LaurentPoly h = build_h(v);
  const ValidatedToric v2 = validate(syz_converse(h).data);
  REQUIRE(v2.n == v.n);
  REQUIRE(v2.r == v.r);
  REQUIRE(approx_equal(build_h(v2), h));
}
