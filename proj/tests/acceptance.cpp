// Acceptance suite: every check below runs at its stated tolerance and
// prints one pass/fail line.  The binary exits nonzero when any check fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include "syztrop/syztrop.hpp"

using namespace syztrop;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool ok, double seconds,
            const std::string& detail = "") {
  std::printf("[%s] %d. %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
              seconds, detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Novikov T(const Rational& e) { return Novikov::monomial({1, 0}, e); }

LaurentPoly sample_h_314() {
  LaurentPoly h(2);
  h.add_term({1, 0}, Novikov::one());
  h.add_term({0, 1}, T(rational(-1)));
  h.add_term({0, 0}, T(parse_rational("3.14")));
  h.add_term({2, 0}, T(rational(2)));
  h.add_term({1, 1}, Novikov::one());
  h.add_term({0, 2}, T(rational(2)));
  return h;
}

// 1. CP^n critical values, both charts, n = 2 and 3
void criterion_1() {
  bool ok = true;
  std::string detail;
  double worst = 0.0;
  for (int n : {2, 3}) {
    const auto t0 = std::chrono::steady_clock::now();
    CompactificationSpec spec;
    spec.family = CompactificationSpec::Family::CPn;
    spec.n = n;
    spec.E1 = 1;
    const auto eigen = c1_eigenvalues(spec);

    const auto plus = solve_critical_points(spec, Chart::Plus, Rational(20));
    const auto minus = solve_critical_points(spec, Chart::Minus, Rational(20));
    std::vector<Novikov> plus_vals, minus_vals;
    for (const auto& p : plus) plus_vals.push_back(p.value);
    for (const auto& p : minus) minus_vals.push_back(p.value);

    bool case_ok = static_cast<int>(plus.size()) == n + 1 &&
                   static_cast<int>(minus.size()) == n + 1;
    case_ok = case_ok && values_match_multiset(plus_vals, eigen, 1e-9);
    case_ok = case_ok && values_match_multiset(minus_vals, eigen, 1e-9);
    case_ok = case_ok && values_match_multiset(plus_vals, minus_vals, 1e-9);
    for (const auto& p : plus)
      case_ok = case_ok && !p.value.is_zero() &&
                p.value.leading_exp() == Rational(1) / (n + 1) &&
                p.residual.geq(Rational(20));
    const double dt = seconds_since(t0);
    worst = std::max(worst, dt);
    case_ok = case_ok && dt < 1.0;
    if (!case_ok) detail += "n=" + std::to_string(n) + " failed ";
    ok = ok && case_ok;
  }
  report(1, "CP^n critical values reproduce the c1 eigenvalues (n=2,3)", ok, worst,
         detail);
}

// 2. CP^1 x CP^1 with (E1,E2) = (1,1) and (1,3/2)
void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& [E1, E2] : std::vector<std::pair<Rational, Rational>>{
           {Rational(1), Rational(1)}, {Rational(1), rational(3, 2)}}) {
    CompactificationSpec spec;
    spec.family = CompactificationSpec::Family::CPmxCPnm;
    spec.n = 2;
    spec.m = 1;
    spec.E1 = E1;
    spec.E2 = E2;
    const auto points = solve_critical_points(spec, Chart::Y, Rational(20));
    bool case_ok = points.size() == 4;
    int plus_x0 = 0, minus_x0 = 0, plus_y = 0, minus_y = 0;
    std::vector<Novikov> values;
    for (const auto& p : points) {
      case_ok = case_ok && p.coords[0].val().value() == -E2 / 2;
      case_ok = case_ok && p.coords[2].val().value() == (E1 - E2) / 2;
      const Complex cx = p.coords[0].leading_coeff();
      const Complex cy = p.coords[2].leading_coeff();
      if (std::abs(cx - Complex(1, 0)) < 1e-9) ++plus_x0;
      if (std::abs(cx + Complex(1, 0)) < 1e-9) ++minus_x0;
      if (std::abs(cy - Complex(1, 0)) < 1e-9) ++plus_y;
      if (std::abs(cy + Complex(1, 0)) < 1e-9) ++minus_y;
      values.push_back(p.value);
    }
    case_ok = case_ok && plus_x0 == 2 && minus_x0 == 2 && plus_y == 2 && minus_y == 2;
    case_ok = case_ok && values_match_multiset(values, c1_eigenvalues(spec), 1e-9);

    const ExactPLPsi<Rational> psi;
    const auto bases =
        critical_base_points(points, psi, tropicalize(detail::cn_h(2)));
    for (const auto& b : bases) case_ok = case_ok && b.qbar[0] == (E1 - E2) / 2;

    if (!case_ok) detail += "(E1,E2)=(" + to_string(E1) + "," + to_string(E2) + ") failed ";
    ok = ok && case_ok;
  }
  report(2, "product family matches the closed forms and base points", ok,
         seconds_since(t0), detail);
}

// 3. the fibration-preserving identity on 10^4 chart points per chamber
void criterion_3() {
  bool ok = true;
  double worst = 0.0;
  std::string detail;
  for (int n : {2, 3, 4}) {
    const auto t0 = std::chrono::steady_clock::now();
    const ValidatedToric data = validate(standard_cn(n));
    const auto psi = std::make_shared<ExactPLPsi<Rational>>();
    const CommutationReport r =
        verify_commutation<Rational>(data, psi, 10000, 20240808 + n);
    const double dt = seconds_since(t0);
    worst = std::max(worst, dt);
    bool case_ok = r.mismatches == 0 && r.all_branches_covered() && r.total >= 19900 &&
                   dt < 10.0;
    if (!case_ok)
      detail += "n=" + std::to_string(n) + ": mismatches=" + std::to_string(r.mismatches) +
                "/" + std::to_string(r.total) + " time=" + std::to_string(dt) + "s ";
    ok = ok && case_ok;
  }
  report(3, "F o g = j o base holds exactly on 10^4 samples per chamber (n=2,3,4)", ok,
         worst, detail);
}

// 4. tropicalization inequality with equality at unique argmins
void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  Prng rng(31415);
  long total = 0, equality_due = 0, equality_seen = 0;
  bool ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int nvars = static_cast<int>(rng.int_in(1, 3));
    LaurentPoly h(nvars);
    const int nterms = static_cast<int>(rng.int_in(2, 5));
    for (int t = 0; t < nterms; ++t) {
      ExpVec e(nvars);
      for (int i = 0; i < nvars; ++i) e[i] = static_cast<int>(rng.int_in(-3, 3));
      h.add_term(e, Novikov::monomial(rng.complex_unit_scale(),
                                      rng.rational_in(6, {1, 2, 4})));
    }
    if (h.size() < 2) continue;
    const Tropical ht = tropicalize(h);
    for (int pt = 0; pt < 10; ++pt) {
      std::vector<Novikov> y;
      std::vector<Rational> vy;
      for (int i = 0; i < nvars; ++i) {
        const Rational v = rng.rational_in(4, {1, 2, 4});
        Complex lead = rng.complex_unit_scale();
        lead = lead / std::abs(lead) * rng.in(0.8, 1.2);
        y.push_back(Novikov::from_terms(
            {{v, lead}, {v + rational(1, 2), 0.3 * rng.complex_unit_scale()}}, v + 6));
        vy.push_back(v);
      }
      const TropEval te = trop_eval(ht, vy);
      const Valuation vh = h.eval(y).val();
      ++total;
      ok = ok && vh.geq(te.value);
      if (te.argmin.size() == 1) {
        ++equality_due;
        if (!vh.is_infinite() && vh.value() == te.value) ++equality_seen;
      }
    }
  }
  const double dt = seconds_since(t0);
  ok = ok && equality_due > 0 && equality_seen == equality_due && dt < 5.0;
  report(4, "ultrametric bound on 10^3 polynomials x 10 points, equality at unique argmins",
         ok, dt,
         std::to_string(total) + " evaluations, " + std::to_string(equality_seen) + "/" +
             std::to_string(equality_due) + " equalities");
}

// 5. singular locus matching for C^3 and the mixed-degree fan
void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto psi = std::make_shared<ExactPLPsi<Rational>>();
  bool ok = true;
  std::string detail;

  const ValidatedToric c3 = validate(standard_cn(3));
  const SingularLocusReport a = verify_singular_locus(c3, psi, 1000, 99991);
  ok = ok && a.passed() && a.samples >= 900;

  const ValidatedToric mixed = validate(syz_converse(sample_h_314()).data);
  const SingularLocusReport b = verify_singular_locus(mixed, psi, 1000, 99992);
  ok = ok && b.passed() && b.samples >= 900;

  detail = "C^3: " + std::to_string(a.misclassified) + "/" + std::to_string(a.samples) +
           " misclassified, mixed fan: " + std::to_string(b.misclassified) + "/" +
           std::to_string(b.samples);
  report(5, "classification is Singular exactly over the discriminant", ok,
         seconds_since(t0), detail);
}

// 6. SYZ converse round trip on the mixed-degree polynomial
void criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  const LaurentPoly h = sample_h_314();
  const ConverseResult res = syz_converse(h);

  const std::vector<std::pair<std::vector<long>, Rational>> expected = {
      {{1, 0, 0}, Rational(0)},          {{0, 1, 0}, Rational(-1)},
      {{0, 0, 1}, rational(157, 50)},    {{2, 0, -1}, Rational(2)},
      {{1, 1, -1}, Rational(0)},         {{0, 2, -1}, Rational(2)}};

  bool ok = res.data.rays.size() == 6;
  for (const auto& [ray, lambda] : expected) {
    bool found = false;
    for (std::size_t j = 0; j < res.data.rays.size(); ++j)
      if (res.data.rays[j] == ray && res.data.lambdas[j] == lambda) found = true;
    ok = ok && found;
  }
  const ValidatedToric v = validate(res.data);
  const LaurentPoly h2 = build_h(v);
  ok = ok && h2.size() == h.size() && approx_equal(h2, h, 1e-15);
  report(6, "SYZ converse reproduces the six rays and lambdas; build_h inverts it", ok,
         seconds_since(t0));
}

// 7. Newton lifting: the valuation defect at least doubles per iteration
void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string doc;

  auto doubling = [&](const std::string& label, const LaurentPoly& w,
                      std::vector<Novikov> seed) {
    const auto lift = newton_lift_from_seed(w, std::move(seed), Rational(20));
    bool case_ok = lift.converged && lift.residual.geq(Rational(20)) &&
                   lift.defects.size() >= 3;
    doc += label + ": defects";
    for (std::size_t i = 0; i < lift.defects.size(); ++i) {
      doc += (i ? "," : " ") + to_string(lift.defects[i]);
      if (i + 1 < lift.defects.size())
        case_ok = case_ok &&
                  lift.defects[i + 1] >= std::min<Rational>(2 * lift.defects[i], 20);
    }
    doc += "; ";
    ok = ok && case_ok;
  };

  {
    LaurentPoly w(1);
    w.add_term({1}, Novikov::one());
    w.add_term({-1}, T(rational(1)));
    doubling("y + T/y", w,
             {Novikov::from_terms({{rational(1, 2), {1, 0}}, {rational(5, 8), {0.4, 0}}},
                                  rational(45))});
  }
  {
    CompactificationSpec spec;
    spec.family = CompactificationSpec::Family::CPn;
    spec.n = 2;
    spec.E1 = 1;
    const LaurentPoly w = build_superpotential(spec, Chart::Plus);
    doubling("CP^2 system", w,
             {Novikov::from_terms({{Rational(0), {1, 0}}, {rational(1, 8), {0.3, 0.1}}},
                                  rational(45)),
              Novikov::from_terms({{rational(1, 3), {1, 0}},
                                   {rational(1, 3) + rational(1, 8), {-0.2, 0.2}}},
                                  rational(45) + rational(1, 3))});
  }
  report(7, "Newton lifting at least doubles the residual defect up to precision 20", ok,
         seconds_since(t0), doc);
}

// 8. the n = 2 dual singular fiber splits into the two expected families
void criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  const Rational psi0(1);
  const auto psi = std::make_shared<ExactPLPsi<Rational>>();
  const VarietyFibration<Rational> fib(detail::cn_h(2), psi);

  Prng rng(271828);
  long mc = 0, extra = 0;
  bool ok = true;
  long produced = 0;
  for (long i = 0; produced < 1000 && i < 4000; ++i) {
    const bool make_extra = rng.below(2) == 0;
    Novikov z0, z1;
    if (make_extra) {
      // both coordinates unital: the S2 family, reduction product != 1
      z0 = detail::sampled_unit(rng, Rational(0), Rational(12));
      z1 = detail::sampled_unit(rng, Rational(0), Rational(12));
      if (std::abs(z0.leading_coeff() * z1.leading_coeff() - Complex(1, 0)) < 1e-6)
        continue;
    } else {
      // one coordinate in the maximal ideal: the S1 family
      z0 = rng.below(4) == 0 ? Novikov::zero(Rational(12))
                             : detail::sampled_unit(rng, rational(rng.int_in(0, 4), 2),
                                                    Rational(12));
      z1 = detail::sampled_unit(rng, rational(rng.int_in(1, 6), 2), Rational(12));
      if (rng.below(2) == 0) std::swap(z0, z1);
    }
    const Novikov y = -Novikov::one() + z0 * z1;
    if (y.is_zero()) continue;
    const VarietyPoint z{z0.shifted(-psi0), z1.shifted(psi0), {y}};
    ++produced;

    // the point lies in the fiber over the origin
    const BasePoint base = fib.f(z);
    ok = ok && base.qbar == std::vector<Rational>{Rational(0)} && base.qn == 0;

    // classify via val(1+y) and compare against the (z0, z1) description
    const SingularFiberClass cls = fib.classify_singular_fiber_n2(z);
    const bool z_side_mc = z0.val().gt(Rational(0)) || z1.val().gt(Rational(0));
    ok = ok && (cls == SingularFiberClass::MaurerCartan) == z_side_mc;
    (cls == SingularFiberClass::MaurerCartan ? mc : extra)++;
  }
  ok = ok && produced == 1000 && mc + extra == produced && extra > 0 && mc > 0;
  report(8, "dual singular fiber decomposes into the two families with S2 nonempty", ok,
         seconds_since(t0),
         std::to_string(mc) + " Maurer-Cartan + " + std::to_string(extra) + " extra");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (failures == 0)
    std::printf("all acceptance checks passed\n");
  else
    std::printf("%d acceptance check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
