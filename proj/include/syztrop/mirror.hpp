#pragma once

#include <array>
#include <cstdlib>
#include <future>
#include <thread>

#include "syztrop/fibration.hpp"
#include "syztrop/prng.hpp"
#include "syztrop/toric.hpp"

namespace syztrop {

enum class Chamber { Plus, Minus };

inline const char* to_string(Chamber c) { return c == Chamber::Plus ? "plus" : "minus"; }

// Point of one of the two chamber charts in (Lambda^*)^n.  The first n-1
// coordinates carry the base valuations; the last one encodes the area
// coordinate, val(y_n) = psi_plus(q) or psi_minus(q).
struct ChartPoint {
  Chamber chamber;
  std::vector<Novikov> y;
};

// The two affinoid charts glued along a thickened wall of rational margin.
// psi_minus = psi and psi_plus = psi - h_trop on the overlap.
template <typename S>
class MirrorCharts {
 public:
  MirrorCharts(LaurentPoly h, std::shared_ptr<const PsiModel<S>> psi,
               Rational wall_margin = rational(1, 10))
      : h_(std::move(h)),
        h_trop_(tropicalize(h_)),
        psi_(std::move(psi)),
        margin_(std::move(wall_margin)) {
    if (!(margin_ > 0)) throw DomainError("wall margin must be positive");
  }

  int n() const { return h_.nvars() + 1; }
  const LaurentPoly& h() const { return h_; }
  const Tropical& h_trop() const { return h_trop_; }
  const PsiModel<S>& psi() const { return *psi_; }
  const Rational& margin() const { return margin_; }

  BasePointT<S> base_of(const ChartPoint& p) const {
    if (static_cast<int>(p.y.size()) != n()) throw DomainError("chart point arity mismatch");
    std::vector<Rational> qbar;
    for (int k = 0; k + 1 < n(); ++k) {
      if (p.y[k].is_zero()) throw NotInChart("chart coordinate vanishes");
      qbar.push_back(p.y[k].val().value());
    }
    if (p.y[n() - 1].is_zero()) throw NotInChart("chart coordinate vanishes");
    Rational area = p.y[n() - 1].val().value();
    if (p.chamber == Chamber::Plus) area += trop_eval(h_trop_, qbar).value;
    if (!(area > 0))
      throw NotInChart("val(y_n) encodes no base point: psi value " + to_string(area) +
                       " <= 0");
    const S qn = psi_->psi_inverse(qbar, ScalarOps<S>::from(area));
    // The wall thickening pinches off at the discriminant: over the
    // tropical hypersurface each chart keeps its strict side, which is what
    // makes the fibration-preserving identity hold there.
    const bool on_pi = on_tropical_hypersurface(h_trop_, qbar);
    const S bound = on_pi ? S(0) : ScalarOps<S>::from(margin_);
    if (p.chamber == Chamber::Plus && !(qn > -bound))
      throw NotInChart("plus chart stops at the thickened wall");
    if (p.chamber == Chamber::Minus && !(qn < bound))
      throw NotInChart("minus chart stops at the thickened wall");
    return {std::move(qbar), qn};
  }

  bool in_chart(const ChartPoint& p) const {
    try {
      base_of(p);
      return true;
    } catch (const NotInChart&) {
      return false;
    } catch (const ModelNotInvertible&) {
      return false;
    }
  }

  // Wall-crossing map Phi on the overlap: (ybar, y_n) -> (ybar, y_n h(ybar)).
  ChartPoint glue(const ChartPoint& p) const {
    if (p.chamber != Chamber::Plus) throw NotInOverlap("glue maps the plus chart");
    const BasePointT<S> q = base_of(p);  // throws NotInChart when outside
    if (on_tropical_hypersurface(h_trop_, q.qbar))
      throw NotInOverlap("wall neighborhoods pinch off at the hypersurface");
    const S bound = ScalarOps<S>::from(margin_);
    if (!(q.qn < bound) || !(q.qn > -bound))
      throw NotInOverlap("point is outside the wall neighborhood");
    ChartPoint out;
    out.chamber = Chamber::Minus;
    out.y = p.y;
    out.y[n() - 1] =
        p.y[n() - 1] * h_.eval(std::span<const Novikov>(p.y.data(), p.y.size() - 1));
    return out;
  }

  // The analytic embedding into the variety x0 x1 = h:
  //   g_plus(y)  = (1/y_n,    y_n h(ybar), ybar)
  //   g_minus(y) = (h(ybar)/y_n,   y_n,    ybar)
  VarietyPoint g(const ChartPoint& p) const {
    base_of(p);  // chart membership
    const Novikov& yn = p.y[n() - 1];
    const Novikov hval = h_.eval(std::span<const Novikov>(p.y.data(), p.y.size() - 1));
    VarietyPoint z;
    z.y.assign(p.y.begin(), p.y.end() - 1);
    if (p.chamber == Chamber::Plus) {
      z.x0 = invert(yn);
      z.x1 = yn * hval;
    } else {
      z.x0 = hval * invert(yn);
      z.x1 = yn;
    }
    return z;
  }

 private:
  LaurentPoly h_;
  Tropical h_trop_;
  std::shared_ptr<const PsiModel<S>> psi_;
  Rational margin_;
};

// Proof-branch bookkeeping for the commutation check: chamber x whether the
// base valuations lie on the tropical hypersurface.
enum class CommutationBranch { PlusOnWall, PlusGeneric, MinusOnWall, MinusGeneric };

inline const char* to_string(CommutationBranch b) {
  switch (b) {
    case CommutationBranch::PlusOnWall: return "1a";
    case CommutationBranch::PlusGeneric: return "1b";
    case CommutationBranch::MinusOnWall: return "2a";
    case CommutationBranch::MinusGeneric: return "2b";
  }
  return "?";
}

struct CommutationReport {
  int n = 0;
  long samples_per_chamber = 0;
  std::uint64_t seed = 0;
  std::string model;
  long total = 0;
  long mismatches = 0;
  std::array<long, 4> branch_counts{};  // 1a, 1b, 2a, 2b
  long forced_cancellations = 0;

  struct Mismatch {
    long index;
    Chamber chamber;
    std::string detail;
  };
  std::vector<Mismatch> examples;  // first few only

  bool all_branches_covered() const {
    for (long c : branch_counts)
      if (c == 0) return false;
    return true;
  }
  bool passed() const { return mismatches == 0 && all_branches_covered(); }
};

struct VerifyOptions {
  Rational margin = rational(1, 10);
  Rational unit_precision = Rational(8);   // relative precision of sampled units
  int threads = 0;                         // 0: decide from SYZTROP_THREADS / hardware
  bool inject_bug = false;                 // negative control: corrupts j on purpose
  double tol = 0.0;                        // 0 means exact comparison
};

namespace detail {

// makes one tropical tie hold exactly by solving for a single coordinate
inline bool try_solve_onto_hypersurface(Prng& rng, const Tropical& ht,
                                        std::vector<Rational>& qbar) {
  const auto& terms = ht.terms();
  if (terms.size() < 2) return false;
  const std::size_t i = rng.below(terms.size());
  std::size_t j = rng.below(terms.size() - 1);
  if (j >= i) ++j;
  const int m = static_cast<int>(qbar.size());
  int pivot = -1;
  for (int t = 0; t < m; ++t)
    if (terms[i].exps[t] != terms[j].exps[t]) pivot = t;
  if (pivot < 0) return false;
  Rational rhs = terms[j].constant - terms[i].constant;
  for (int t = 0; t < m; ++t) {
    if (t == pivot) continue;
    rhs += (terms[j].exps[t] - terms[i].exps[t]) * qbar[t];
  }
  qbar[pivot] = rhs / (terms[i].exps[pivot] - terms[j].exps[pivot]);
  return on_tropical_hypersurface(ht, qbar);
}

inline Novikov sampled_unit(Prng& rng, const Rational& v, const Rational& rel) {
  Complex lead = rng.complex_unit_scale();
  lead = lead / std::abs(lead) * rng.in(0.8, 1.2);
  std::vector<Novikov::Term> terms{{v, lead},
                                   {v + rational(1, 2), 0.3 * rng.complex_unit_scale()},
                                   {v + rational(3, 2), 0.3 * rng.complex_unit_scale()}};
  return Novikov::from_terms(std::move(terms), v + rel);
}

// Draws a chart point over the requested chamber.  force_on_pi solves one
// tropical tie exactly; force_cancel additionally cancels the leading
// coefficients of the tied terms so val(h(y)) jumps above h_trop.
template <typename S>
class ChartSampler {
 public:
  ChartSampler(const MirrorCharts<S>& charts, Rational unit_precision)
      : charts_(charts), rel_(std::move(unit_precision)) {}

  ChartPoint sample(Prng& rng, Chamber chamber, bool force_on_pi, bool force_cancel,
                    bool* cancelled) const {
    const int n = charts_.n();
    const Tropical& ht = charts_.h_trop();
    std::vector<Rational> qbar(n - 1);
    for (int attempt = 0;; ++attempt) {
      for (auto& q : qbar) q = rng.rational_in(3, {1, 2});
      if (!force_on_pi) break;
      if (solve_onto_hypersurface(rng, qbar) || attempt > 20) break;
    }

    // area coordinate via a rational qn kept strictly inside the chamber;
    // over the hypersurface the thickening vanishes, so stay on the strict
    // side there
    const Rational m = charts_.margin();
    const bool on_pi = on_tropical_hypersurface(ht, qbar);
    Rational qn;
    if (chamber == Chamber::Plus)
      qn = rational(rng.int_in(on_pi ? 1 : -1, 40), 20) * m * 2;  // (-m/10, 4m]
    else
      qn = rational(rng.int_in(-40, on_pi ? -1 : 1), 20) * m * 2;
    if (qn == 0) qn = chamber == Chamber::Plus ? Rational(m / 2) : Rational(-m / 2);
    const S psi_q = charts_.psi().psi(qbar, ScalarOps<S>::from(qn));
    Rational vn = ScalarOps<S>::rationalize(psi_q);
    if (chamber == Chamber::Plus) vn -= trop_eval(ht, qbar).value;

    ChartPoint p;
    p.chamber = chamber;
    for (int k = 0; k < n - 1; ++k) p.y.push_back(unit(rng, qbar[k]));
    p.y.push_back(unit(rng, vn));

    if (cancelled) *cancelled = false;
    if (force_cancel && on_tropical_hypersurface(ht, qbar) && cancel_leads(p, qbar) &&
        cancelled)
      *cancelled = true;
    return p;
  }

 private:
  Novikov unit(Prng& rng, const Rational& v) const { return sampled_unit(rng, v, rel_); }

  bool solve_onto_hypersurface(Prng& rng, std::vector<Rational>& qbar) const {
    return try_solve_onto_hypersurface(rng, charts_.h_trop(), qbar);
  }

  // forces sum of leading coefficients of the tied terms of h(y) to zero by
  // retuning the lead of one tied single-variable term
  bool cancel_leads(ChartPoint& p, const std::vector<Rational>& qbar) const {
    const auto eval = trop_eval(charts_.h_trop(), qbar);
    const auto& hterms = charts_.h().terms();
    std::vector<std::pair<ExpVec, Novikov>> tied;
    {
      std::size_t idx = 0;
      for (const auto& [e, c] : hterms) {
        for (std::size_t a : eval.argmin)
          if (a == idx) tied.push_back({e, c});
        ++idx;
      }
    }
    // the tropical terms and the polynomial terms are index-aligned through
    // tropicalize(), which walks the same ordered map
    int adjustable = -1, var = -1;
    for (std::size_t t = 0; t < tied.size(); ++t) {
      int nz = -1, count = 0;
      for (int k = 0; k < static_cast<int>(tied[t].first.size()); ++k)
        if (tied[t].first[k] != 0) {
          nz = k;
          count += std::abs(tied[t].first[k]);
        }
      if (count == 1 && tied[t].first[nz] == 1) {  // linear in a single variable
        adjustable = static_cast<int>(t);
        var = nz;
        break;
      }
    }
    if (adjustable < 0) return false;
    Complex others(0.0, 0.0);
    for (std::size_t t = 0; t < tied.size(); ++t) {
      if (static_cast<int>(t) == adjustable) continue;
      Complex lc = tied[t].second.leading_coeff();
      for (int k = 0; k < static_cast<int>(tied[t].first.size()); ++k)
        for (int rep = 0; rep < std::abs(tied[t].first[k]); ++rep)
          lc = tied[t].first[k] > 0 ? lc * p.y[k].leading_coeff()
                                    : lc / p.y[k].leading_coeff();
      others += lc;
    }
    if (std::abs(others) < 1e-6) return false;
    const Complex target = -others / tied[adjustable].second.leading_coeff();
    if (std::abs(target) < 1e-3 || std::abs(target) > 1e3) return false;
    auto terms = p.y[var].terms();
    terms.front().coeff = target;
    p.y[var] = Novikov::from_terms(std::move(terms), p.y[var].precision());
    return true;
  }

  const MirrorCharts<S>& charts_;
  Rational rel_;
};

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SYZTROP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace detail

// Machine check of F o g = j o pi_0^vee on seeded random chart points.
// Every coordinate is compared exactly in the rational regime (tol = 0) or
// within tol otherwise.  Failures are reported, never thrown.
template <typename S>
CommutationReport verify_commutation(const ValidatedToric& data,
                                     std::shared_ptr<const PsiModel<S>> psi,
                                     long samples_per_chamber, std::uint64_t seed,
                                     const VerifyOptions& opts = {}) {
  const LaurentPoly h = build_h(data);
  const MirrorCharts<S> charts(h, psi, opts.margin);
  const VarietyFibration<S> fib(h, psi);
  const detail::ChartSampler<S> sampler(charts, opts.unit_precision);

  CommutationReport report;
  report.n = charts.n();
  report.samples_per_chamber = samples_per_chamber;
  report.seed = seed;

  const int nthreads = detail::resolve_threads(opts.threads);
  // both chambers run in the same pool
  const long chunk = std::max<long>(1, (2 * samples_per_chamber + nthreads - 1) / nthreads);

  struct Partial {
    long total = 0, mismatches = 0, cancels = 0;
    std::array<long, 4> branches{};
    std::vector<CommutationReport::Mismatch> examples;
  };

  // one stream per sample index, so reports do not depend on the thread count
  auto run_chunk = [&](Chamber chamber, long begin, long end) {
    Partial part;
    for (long i = begin; i < end; ++i) {
      Prng rng = Prng(seed).fork(
          (chamber == Chamber::Plus ? 0x100000000ull : 0x200000000ull) +
          static_cast<std::uint64_t>(i));
      const bool force_pi = rng.below(3) == 0;
      const bool force_cancel = force_pi && rng.below(2) == 0;
      bool cancelled = false;
      ChartPoint p = sampler.sample(rng, chamber, force_pi, force_cancel, &cancelled);
      if (!charts.in_chart(p)) continue;  // conservative: resampling would bias the seed
      part.cancels += cancelled ? 1 : 0;

      const BasePointT<S> q = charts.base_of(p);
      ImagePointT<S> expected = j_embed(q, charts.psi(), charts.h_trop());
      if (opts.inject_bug) expected.u1 = expected.u1 + S(1);
      const ImagePointT<S> got = fib.F(charts.g(p));

      const bool on_pi = on_tropical_hypersurface(charts.h_trop(), q.qbar);
      const CommutationBranch branch =
          chamber == Chamber::Plus
              ? (on_pi ? CommutationBranch::PlusOnWall : CommutationBranch::PlusGeneric)
              : (on_pi ? CommutationBranch::MinusOnWall : CommutationBranch::MinusGeneric);
      part.branches[static_cast<int>(branch)]++;
      part.total++;

      const double tol = opts.tol;
      bool ok = got.qbar == expected.qbar;
      ok = ok && ScalarOps<S>::eq(got.u0, expected.u0, tol);
      ok = ok && ScalarOps<S>::eq(got.u1, expected.u1, tol);
      if (!ok) {
        part.mismatches++;
        if (part.examples.size() < 5)
          part.examples.push_back({i, chamber, "branch " + std::string(to_string(branch))});
      }
    }
    return part;
  };

  std::vector<std::future<Partial>> futures;
  for (Chamber chamber : {Chamber::Plus, Chamber::Minus}) {
    for (long begin = 0; begin < samples_per_chamber; begin += chunk) {
      const long end = std::min(begin + chunk, samples_per_chamber);
      futures.push_back(std::async(
          nthreads == 1 ? std::launch::deferred : std::launch::async, run_chunk, chamber,
          begin, end));
    }
  }
  for (auto& f : futures) {
    const Partial part = f.get();
    report.total += part.total;
    report.mismatches += part.mismatches;
    report.forced_cancellations += part.cancels;
    for (int b = 0; b < 4; ++b) report.branch_counts[b] += part.branches[b];
    for (const auto& ex : part.examples)
      if (report.examples.size() < 5) report.examples.push_back(ex);
  }
  return report;
}

struct SingularLocusReport {
  long samples = 0;
  long singular_seen = 0;
  long smooth_seen = 0;
  long misclassified = 0;
  std::uint64_t seed = 0;
  bool passed() const {
    return samples > 0 && singular_seen > 0 && smooth_seen > 0 && misclassified == 0;
  }
};

// Samples base points on and off the discriminant, constructs variety points
// over them (through the chart embedding where the charts exist, directly on
// the singular fibers where they do not), and checks that the F-point
// classification returns Singular exactly over qn = 0 on the hypersurface.
inline SingularLocusReport verify_singular_locus(
    const ValidatedToric& data, std::shared_ptr<const PsiModel<Rational>> psi,
    long samples, std::uint64_t seed, Rational unit_precision = Rational(12)) {
  const LaurentPoly h = build_h(data);
  const MirrorCharts<Rational> charts(h, psi);
  const VarietyFibration<Rational> fib(h, psi);
  const Tropical& ht = charts.h_trop();
  const int m = h.nvars();

  SingularLocusReport report;
  report.seed = seed;
  for (long i = 0; i < samples; ++i) {
    Prng rng = Prng(seed).fork(0x300000000ull + static_cast<std::uint64_t>(i));
    std::vector<Rational> qbar(m);
    for (auto& q : qbar) q = rng.rational_in(3, {1, 2});
    // four regimes: discriminant, wall off the hypersurface, over the
    // hypersurface away from the wall, fully generic
    const int mode = static_cast<int>(rng.below(4));
    if (mode == 0 || mode == 2) {
      for (int attempt = 0; attempt < 20; ++attempt)
        if (detail::try_solve_onto_hypersurface(rng, ht, qbar)) break;
    }
    const bool on_pi = on_tropical_hypersurface(ht, qbar);
    const Rational qn = mode <= 1 ? Rational(0)
                                  : rational(rng.int_in(0, 1) == 0 ? -1 : 1, 1) *
                                        rational(rng.int_in(1, 8), 4);

    VarietyPoint z;
    if (qn == 0) {
      // over the wall: val(x1) = psi0, val(x0) = val(h(y)) - psi0; this is a
      // singular-fiber point exactly when qbar is on the hypersurface
      std::vector<Novikov> y;
      for (const auto& q : qbar) y.push_back(detail::sampled_unit(rng, q, unit_precision));
      const Novikov hval = h.eval(y);
      if (hval.is_zero()) continue;  // cancellation beyond precision; resample
      const Novikov x1 =
          Novikov::monomial(rng.complex_unit_scale(), psi->psi0(qbar));
      z = VarietyPoint{hval * invert(x1), x1, std::move(y)};
    } else {
      const Chamber chamber = qn > 0 ? Chamber::Plus : Chamber::Minus;
      Rational vn = psi->psi(qbar, qn);
      if (chamber == Chamber::Plus) vn -= trop_eval(ht, qbar).value;
      ChartPoint p;
      p.chamber = chamber;
      for (const auto& q : qbar) p.y.push_back(detail::sampled_unit(rng, q, unit_precision));
      p.y.push_back(detail::sampled_unit(rng, vn, unit_precision));
      z = charts.g(p);
    }

    const bool expect_singular = qn == 0 && on_pi;
    const bool got_singular = fib.classify(z) == FPointClass::Singular;
    report.samples++;
    (expect_singular ? report.singular_seen : report.smooth_seen)++;
    if (expect_singular != got_singular) report.misclassified++;
  }
  return report;
}

}  // namespace syztrop
