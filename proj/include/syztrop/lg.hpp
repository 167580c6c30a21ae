#pragma once

#include <numeric>
#include <optional>
#include <unordered_set>

#include "syztrop/fibration.hpp"
#include "syztrop/prng.hpp"
#include "syztrop/toric.hpp"

namespace syztrop {

enum class Chart { Plus, Minus, Y };

inline const char* to_string(Chart c) {
  switch (c) {
    case Chart::Plus: return "plus";
    case Chart::Minus: return "minus";
    case Chart::Y: return "y";
  }
  return "?";
}

// Term-wise multiplication by <alpha, theta>.
inline LaurentPoly log_derivative(const LaurentPoly& w, const ExpVec& theta) {
  if (static_cast<int>(theta.size()) != w.nvars())
    throw DomainError("log_derivative direction arity mismatch");
  LaurentPoly r(w.nvars());
  for (const auto& [e, c] : w.terms()) {
    long pairing = 0;
    for (int i = 0; i < w.nvars(); ++i) pairing += static_cast<long>(e[i]) * theta[i];
    if (pairing != 0) r.add_term(e, Complex(static_cast<double>(pairing), 0.0) * c);
  }
  return r;
}

// Ambient compactification producing the superpotential.
struct CompactificationSpec {
  enum class Family { Cn, CPn, CPmxCPnm, Custom };
  Family family = Family::CPn;
  int n = 2;
  int m = 1;           // CPm x CP(n-m) only
  Rational E1 = Rational(1);
  Rational E2 = Rational(1);
  LaurentPoly custom_w{0};
  Chart custom_chart = Chart::Y;
  LaurentPoly custom_h{0};  // defining polynomial for Y-chart custom input
};

namespace detail {

inline LaurentPoly cn_h(int n) {
  LaurentPoly h(n - 1);
  h.add_term(ExpVec(n - 1, 0), Novikov::one());
  for (int s = 0; s < n - 1; ++s) {
    ExpVec e(n - 1, 0);
    e[s] = 1;
    h.add_term(e, Novikov::one());
  }
  return h;
}

// 1 + y_1 + ... + y_{n-1} viewed inside the n-variable chart.
inline LaurentPoly cn_h_lifted(int n) { return lift_last(cn_h(n)); }

inline void check_spec(const CompactificationSpec& spec) {
  if (spec.n < 1) throw UnsupportedFamily("n must be at least 1");
  if (spec.family == CompactificationSpec::Family::CPmxCPnm &&
      !(spec.m > 0 && spec.m < spec.n))
    throw UnsupportedFamily("need 0 < m < n for a product of projective spaces");
  if (spec.family == CompactificationSpec::Family::CPn && !(spec.E1 > 0))
    throw UnsupportedFamily("symplectic area E must be positive");
  if (spec.family == CompactificationSpec::Family::CPmxCPnm &&
      (!(spec.E1 > 0) || !(spec.E2 > 0)))
    throw UnsupportedFamily("symplectic areas must be positive");
}

}  // namespace detail

// Closed-form superpotentials in the requested chart.  Plus/Minus charts use
// variables (y_1..y_n); the Y chart uses (x_0, x_1, y_1..y_{n-1}).
inline LaurentPoly build_superpotential(const CompactificationSpec& spec, Chart chart) {
  using Family = CompactificationSpec::Family;
  detail::check_spec(spec);
  const int n = spec.n;

  if (spec.family == Family::Custom) {
    if (chart != spec.custom_chart)
      throw UnsupportedFamily("custom potential is only defined in its own chart");
    if (spec.custom_w.empty()) throw UnsupportedFamily("custom potential is empty");
    return spec.custom_w;
  }

  auto y_monomial = [&](int nvars, std::initializer_list<std::pair<int, int>> powers,
                        const Novikov& c) {
    ExpVec e(nvars, 0);
    for (auto [idx, p] : powers) e[idx] = p;
    return LaurentPoly::monomial(nvars, e, c);
  };

  if (spec.family == Family::Cn) {
    if (chart == Chart::Plus) {
      LaurentPoly w = y_monomial(n, {{n - 1, 1}}, Novikov::one()) * detail::cn_h_lifted(n);
      return w;
    }
    if (chart == Chart::Minus) return y_monomial(n, {{n - 1, 1}}, Novikov::one());
    // on the variety the potential is the second coordinate
    LaurentPoly w(n + 1);
    ExpVec x1(n + 1, 0);
    x1[1] = 1;
    w.add_term(x1, Novikov::one());
    return w;
  }

  if (spec.family == Family::CPn) {
    const Novikov te = Novikov::monomial({1, 0}, spec.E1);
    if (chart == Chart::Y) {
      LaurentPoly w(n + 1);
      ExpVec x1(n + 1, 0);
      x1[1] = 1;
      w.add_term(x1, Novikov::one());
      ExpVec corr(n + 1, 0);
      corr[0] = n;
      for (int k = 2; k < n + 1; ++k) corr[k] = -1;
      w.add_term(corr, te);
      return w;
    }
    ExpVec frac(n, -1);
    frac[n - 1] = -n;
    if (chart == Chart::Plus) {
      LaurentPoly w = y_monomial(n, {{n - 1, 1}}, Novikov::one()) * detail::cn_h_lifted(n);
      w.add_term(frac, te);
      return w;
    }
    LaurentPoly w = y_monomial(n, {{n - 1, 1}}, Novikov::one());
    w = w + LaurentPoly::monomial(n, frac, te) * detail::cn_h_lifted(n).pow(n);
    return w;
  }

  // CPm x CP(n-m)
  const int m = spec.m;
  const Novikov t1 = Novikov::monomial({1, 0}, spec.E1);
  const Novikov t2 = Novikov::monomial({1, 0}, spec.E2);
  if (chart == Chart::Y) {
    LaurentPoly w(n + 1);
    ExpVec x1(n + 1, 0);
    x1[1] = 1;
    w.add_term(x1, Novikov::one());
    ExpVec c1(n + 1, 0);
    c1[0] = m;
    for (int k = 0; k < m; ++k) c1[2 + k] = -1;
    w.add_term(c1, t1);
    ExpVec c2(n + 1, 0);
    c2[0] = n - m;
    for (int k = m; k < n - 1; ++k) c2[2 + k] = -1;
    w.add_term(c2, t2);
    return w;
  }
  ExpVec f1(n, 0), f2(n, 0);
  for (int k = 0; k < m; ++k) f1[k] = -1;
  f1[n - 1] = -m;
  for (int k = m; k < n - 1; ++k) f2[k] = -1;
  f2[n - 1] = -(n - m);
  if (chart == Chart::Plus) {
    LaurentPoly w = y_monomial(n, {{n - 1, 1}}, Novikov::one()) * detail::cn_h_lifted(n);
    w.add_term(f1, t1);
    w.add_term(f2, t2);
    return w;
  }
  LaurentPoly w = y_monomial(n, {{n - 1, 1}}, Novikov::one());
  w = w + LaurentPoly::monomial(n, f1, t1) * detail::cn_h_lifted(n).pow(m);
  w = w + LaurentPoly::monomial(n, f2, t2) * detail::cn_h_lifted(n).pow(n - m);
  return w;
}

// W_minus o Phi = W_plus, checked symbolically with denominators cleared by
// the appropriate power of h.
inline bool wall_crossing_check(const LaurentPoly& w_plus, const LaurentPoly& w_minus,
                                const LaurentPoly& h, double tol = kCoeffCompareTol) {
  const ClearedComposition lhs = compose_last_with(w_minus, h);
  const LaurentPoly rhs = w_plus * lift_last(h).pow(lhs.clearing_power);
  return approx_equal(lhs.poly, rhs, tol);
}

struct CriticalPoint {
  Chart chart;
  std::vector<Novikov> coords;
  Novikov value;
  Valuation residual = Valuation::infinite(Rational(0));
  // valuation defect above the tropical level of the equations, recorded
  // after each lift iteration
  std::vector<Rational> defect_history;
};

struct SolveOptions {
  long candidate_cap = 10000;
  int newton_starts = 240;
  int max_lift_iterations = 64;
  double dedup_tol = 1e-6;
  double lead_tol = 1e-12;
};

struct SolveDiagnostics {
  std::vector<std::string> notes;
};

namespace detail {

struct EquationTable {
  std::vector<ExpVec> alphas;
  std::vector<Rational> vals;
  std::vector<Complex> leads;
  LaurentPoly poly{0};
};

inline std::vector<EquationTable> equation_tables(const LaurentPoly& w) {
  const int n = w.nvars();
  std::vector<EquationTable> eqs;
  for (int k = 0; k < n; ++k) {
    ExpVec dir(n, 0);
    dir[k] = 1;
    EquationTable table;
    table.poly = log_derivative(w, dir);
    if (table.poly.empty())
      throw DomainError("potential is independent of variable " + std::to_string(k + 1));
    for (const auto& [e, c] : table.poly.terms()) {
      table.alphas.push_back(e);
      table.vals.push_back(c.val().value());
      table.leads.push_back(c.leading_coeff());
    }
    eqs.push_back(std::move(table));
  }
  return eqs;
}

// Cofactor determinant over __int128; dimensions stay tiny.
inline __int128 int_det(const std::vector<std::vector<long>>& m, std::vector<int>& cols,
                        int row) {
  if (cols.size() == 1) return m[row][cols[0]];
  __int128 acc = 0;
  for (std::size_t ci = 0; ci < cols.size(); ++ci) {
    const long entry = m[row][cols[ci]];
    if (entry == 0) continue;
    std::vector<int> rest;
    for (std::size_t cj = 0; cj < cols.size(); ++cj)
      if (cj != ci) rest.push_back(cols[cj]);
    const __int128 sub = int_det(m, rest, row + 1);
    const __int128 term = static_cast<__int128>(entry) * sub;
    acc += (ci % 2 == 0) ? term : -term;
  }
  return acc;
}

inline __int128 int_det(std::vector<std::vector<long>> m) {
  std::vector<int> cols;
  for (std::size_t i = 0; i < m.size(); ++i) cols.push_back(static_cast<int>(i));
  return int_det(m, cols, 0);
}

// All balanced valuation candidates: one tied pair per equation, solved as a
// small integer linear system, then verified against the full min.
inline std::vector<std::vector<Rational>> balanced_valuations(
    const std::vector<EquationTable>& eqs, long cap, SolveDiagnostics* diag) {
  const int n = static_cast<int>(eqs.size());

  long denom_lcm = 1;
  for (const auto& eq : eqs)
    for (const auto& v : eq.vals) {
      if (!v.get_den().fits_slong_p())
        throw DomainError("coefficient valuations too large for the balancing path");
      denom_lcm = std::lcm(denom_lcm, v.get_den().get_si());
      if (denom_lcm <= 0 || denom_lcm > (1L << 40))
        throw DomainError("coefficient valuations too large for the balancing path");
    }

  std::vector<std::vector<std::pair<int, int>>> pairs(n);
  for (int k = 0; k < n; ++k) {
    const int t = static_cast<int>(eqs[k].alphas.size());
    for (int i = 0; i < t; ++i)
      for (int j = i + 1; j < t; ++j) pairs[k].push_back({i, j});
    if (pairs[k].empty()) return {};  // single-term equation never balances
  }

  std::vector<std::vector<Rational>> candidates;
  std::unordered_set<std::uint64_t> seen;
  std::vector<int> choice(n, 0);
  bool capped = false;

  for (;;) {
    // assemble and solve this combination
    std::vector<std::vector<long>> A(n, std::vector<long>(n));
    std::vector<long> b(n);
    for (int k = 0; k < n; ++k) {
      const auto [i, j] = pairs[k][choice[k]];
      for (int l = 0; l < n; ++l)
        A[k][l] = eqs[k].alphas[i][l] - eqs[k].alphas[j][l];
      const Rational rhs = (eqs[k].vals[j] - eqs[k].vals[i]) * denom_lcm;
      if (!rhs.get_num().fits_slong_p())
        throw DomainError("coefficient valuations too large for the balancing path");
      b[k] = rhs.get_num().get_si();  // denominator 1 by construction
    }
    const __int128 det = int_det(A);
    if (det != 0) {
      std::vector<Rational> w(n);
      std::uint64_t key = 0x9e3779b97f4a7c15ull;
      for (int l = 0; l < n; ++l) {
        std::vector<std::vector<long>> Al = A;
        for (int k = 0; k < n; ++k) Al[k][l] = b[k];
        const __int128 dl = int_det(Al);
        w[l] = Rational(static_cast<long>(dl), static_cast<long>(det) * denom_lcm);
        w[l].canonicalize();
        key ^= hash_rational(w[l]) + 0x9e3779b97f4a7c15ull + (key << 6) + (key >> 2);
      }
      if (seen.insert(key).second) {
        bool balanced = true;
        for (int k = 0; k < n && balanced; ++k) {
          Rational best;
          int count = 0;
          for (std::size_t t = 0; t < eqs[k].alphas.size(); ++t) {
            Rational v = eqs[k].vals[t];
            for (int l = 0; l < n; ++l)
              if (eqs[k].alphas[t][l] != 0) v += eqs[k].alphas[t][l] * w[l];
            if (count == 0 || v < best) {
              best = v;
              count = 1;
            } else if (v == best) {
              ++count;
            }
          }
          balanced = count >= 2;
        }
        if (balanced) {
          if (static_cast<long>(candidates.size()) >= cap) {
            capped = true;
            break;
          }
          candidates.push_back(std::move(w));
        }
      }
    }
    // next combination
    int k = 0;
    while (k < n && ++choice[k] == static_cast<int>(pairs[k].size())) choice[k++] = 0;
    if (k == n) break;
  }
  if (capped && diag)
    diag->notes.push_back("candidate cap reached; enumeration truncated");
  return candidates;
}

// Complex Gaussian solve with partial pivoting; rank-deficient columns get a
// zero step so underdetermined leading systems still make progress.
inline bool complex_solve(std::vector<std::vector<Complex>> m, std::vector<Complex> rhs,
                          std::vector<Complex>& out) {
  const int n = static_cast<int>(rhs.size());
  std::vector<bool> used_row(n, false);
  std::vector<int> pivot_row(n, -1);
  for (int col = 0; col < n; ++col) {
    int best = -1;
    double mag = 1e-14;
    for (int row = 0; row < n; ++row) {
      if (used_row[row]) continue;
      if (std::abs(m[row][col]) > mag) {
        mag = std::abs(m[row][col]);
        best = row;
      }
    }
    if (best < 0) continue;  // deficient column
    used_row[best] = true;
    pivot_row[col] = best;
    for (int row = 0; row < n; ++row) {
      if (row == best || std::abs(m[row][col]) == 0.0) continue;
      const Complex f = m[row][col] / m[best][col];
      for (int j = 0; j < n; ++j) m[row][j] -= f * m[best][j];
      rhs[row] -= f * rhs[best];
    }
  }
  out.assign(n, Complex(0, 0));
  bool any = false;
  for (int col = 0; col < n; ++col) {
    if (pivot_row[col] < 0) continue;
    out[col] = rhs[pivot_row[col]] / m[pivot_row[col]][col];
    any = true;
  }
  return any;
}

// Leading-coefficient system at a balanced valuation: the terms that tie at
// the minimum in each equation, solved over (C*)^n by deterministic
// multistart Newton in log coordinates.
inline std::vector<std::vector<Complex>> solve_leading(
    const std::vector<EquationTable>& eqs, const std::vector<Rational>& w,
    const SolveOptions& opts) {
  const int n = static_cast<int>(eqs.size());
  std::vector<std::vector<std::size_t>> tied(n);
  for (int k = 0; k < n; ++k) {
    Rational best;
    for (std::size_t t = 0; t < eqs[k].alphas.size(); ++t) {
      Rational v = eqs[k].vals[t];
      for (int l = 0; l < n; ++l)
        if (eqs[k].alphas[t][l] != 0) v += eqs[k].alphas[t][l] * w[l];
      if (t == 0 || v < best) {
        best = v;
        tied[k].assign(1, t);
      } else if (v == best) {
        tied[k].push_back(t);
      }
    }
  }

  auto eval = [&](const std::vector<Complex>& a, std::vector<Complex>& g,
                  std::vector<std::vector<Complex>>& jac, double& scale) {
    g.assign(n, Complex(0, 0));
    jac.assign(n, std::vector<Complex>(n, Complex(0, 0)));
    scale = 0.0;
    for (int k = 0; k < n; ++k)
      for (std::size_t t : tied[k]) {
        Complex mono = eqs[k].leads[t];
        for (int l = 0; l < n; ++l) {
          const int p = eqs[k].alphas[t][l];
          for (int rep = 0; rep < std::abs(p); ++rep) mono = p > 0 ? mono * a[l] : mono / a[l];
        }
        g[k] += mono;
        scale += std::abs(mono);
        for (int l = 0; l < n; ++l)
          jac[k][l] += Complex(static_cast<double>(eqs[k].alphas[t][l]), 0.0) * mono;
      }
  };

  std::vector<std::vector<Complex>> roots;
  Prng rng(0x5eedu);
  for (int start = 0; start < opts.newton_starts; ++start) {
    std::vector<Complex> a(n);
    for (int l = 0; l < n; ++l)
      a[l] = std::polar(std::exp(rng.in(-1.2, 1.2)), rng.in(0.0, 2.0 * std::numbers::pi));
    bool ok = false;
    int polish = 2;  // extra steps push seed errors below the cleanup threshold
    for (int iter = 0; iter < 60; ++iter) {
      std::vector<Complex> g;
      std::vector<std::vector<Complex>> jac;
      double scale = 0.0;
      eval(a, g, jac, scale);
      double gnorm = 0.0;
      for (const auto& gk : g) gnorm += std::abs(gk);
      if (gnorm <= opts.lead_tol * (1.0 + scale)) {
        ok = true;
        if (polish-- == 0) break;
      }
      std::vector<Complex> delta;
      if (!complex_solve(jac, g, delta)) break;
      bool sane = true;
      for (int l = 0; l < n; ++l) {
        Complex d = delta[l];
        if (std::abs(d) > 2.0) d *= 2.0 / std::abs(d);
        a[l] *= std::exp(-d);
        if (!(std::abs(a[l]) > 1e-8 && std::abs(a[l]) < 1e8)) sane = false;
      }
      if (!sane) break;
    }
    if (!ok) continue;
    bool fresh = true;
    for (const auto& r : roots) {
      double dist = 0.0;
      for (int l = 0; l < n; ++l) dist = std::max(dist, std::abs(r[l] - a[l]));
      if (dist <= opts.dedup_tol) fresh = false;
    }
    if (fresh) roots.push_back(a);
  }
  return roots;
}

struct LiftOutcome {
  std::vector<Novikov> point;
  Valuation residual = Valuation::infinite(Rational(0));
  std::vector<Rational> defects;
  bool converged = false;
  std::string note;
};

// Gaussian elimination over the Novikov field, pivot by minimal valuation.
inline bool novikov_solve(std::vector<std::vector<Novikov>> m, std::vector<Novikov> rhs,
                          std::vector<Novikov>& out) {
  const int n = static_cast<int>(rhs.size());
  std::vector<int> col_of_row(n, -1);
  std::vector<bool> used_row(n, false), used_col(n, false);
  for (int step = 0; step < n; ++step) {
    int prow = -1, pcol = -1;
    Valuation best = Valuation::infinite(Rational(0));
    bool found = false;
    for (int row = 0; row < n; ++row) {
      if (used_row[row]) continue;
      for (int col = 0; col < n; ++col) {
        if (used_col[col] || m[row][col].is_zero()) continue;
        const Valuation v = m[row][col].val();
        if (!found || v < best) {
          best = v;
          prow = row;
          pcol = col;
          found = true;
        }
      }
    }
    if (!found) return false;
    used_row[prow] = true;
    used_col[pcol] = true;
    col_of_row[prow] = pcol;
    const Novikov inv = invert(m[prow][pcol]);
    for (int row = 0; row < n; ++row) {
      if (row == prow || m[row][pcol].is_zero()) continue;
      const Novikov f = m[row][pcol] * inv;
      for (int col = 0; col < n; ++col)
        if (!used_col[col] || col == pcol) m[row][col] -= f * m[prow][col];
      rhs[row] -= f * rhs[prow];
      m[row][pcol] = Novikov::zero(m[row][pcol].precision());
    }
  }
  out.assign(n, Novikov());
  for (int row = 0; row < n; ++row)
    out[col_of_row[row]] = rhs[row] * invert(m[row][col_of_row[row]]);
  return true;
}

inline LiftOutcome newton_lift(const std::vector<EquationTable>& eqs,
                               const std::vector<std::vector<LaurentPoly>>& jacobian,
                               std::vector<Novikov> x, const Rational& precision,
                               const SolveOptions& opts) {
  const int n = static_cast<int>(eqs.size());
  LiftOutcome out;

  // tropical level of each equation at the seed valuations
  std::vector<Rational> w(n);
  for (int l = 0; l < n; ++l) w[l] = x[l].val().value();
  std::vector<Rational> level(n);
  for (int k = 0; k < n; ++k) {
    for (std::size_t t = 0; t < eqs[k].alphas.size(); ++t) {
      Rational v = eqs[k].vals[t];
      for (int l = 0; l < n; ++l)
        if (eqs[k].alphas[t][l] != 0) v += eqs[k].alphas[t][l] * w[l];
      if (t == 0 || v < level[k]) level[k] = v;
    }
  }

  auto residual = [&](const std::vector<Novikov>& pt, Valuation& rv, Rational& defect,
                      std::vector<Novikov>& vals) {
    vals.clear();
    bool first = true;
    bool inf = true;
    Rational rmin, dmin;
    for (int k = 0; k < n; ++k) {
      vals.push_back(eqs[k].poly.eval(pt));
      const Valuation v = vals.back().val();
      const Rational lo = v.lower_bound();
      if (!v.is_infinite()) inf = false;
      if (first || lo < rmin) rmin = lo;
      if (first || lo - level[k] < dmin) dmin = lo - level[k];
      first = false;
    }
    rv = inf ? Valuation::infinite(rmin) : Valuation::finite(rmin);
    defect = dmin;
  };

  Valuation rv = Valuation::infinite(Rational(0));
  Rational defect;
  std::vector<Novikov> r;
  residual(x, rv, defect, r);
  out.defects.push_back(defect);

  for (int iter = 0; iter < opts.max_lift_iterations; ++iter) {
    if (rv.geq(precision)) {
      out.converged = true;
      break;
    }
    std::vector<std::vector<Novikov>> jac(n, std::vector<Novikov>(n));
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) jac[k][l] = jacobian[k][l].eval(x);
    std::vector<Novikov> step;
    if (!novikov_solve(jac, r, step)) {
      out.note = "singular jacobian";
      break;
    }
    bool moved = false, bad = false;
    for (int l = 0; l < n; ++l) {
      if (step[l].is_zero()) continue;
      const Valuation sv = step[l].val();
      if (sv.gt(Rational(0))) {
        x[l] = x[l] * exp_positive(-step[l]);
        moved = true;
      } else if (sv.value() == 0 && std::abs(step[l].leading_coeff()) < 0.9) {
        // order-one multiplicative correction; quadratic speed resumes once
        // the leading coefficient settles
        x[l] = x[l] * (Novikov(Complex(1.0, 0.0), step[l].precision()) - step[l]);
        moved = true;
      } else {
        bad = true;
      }
    }
    if (bad) {
      out.note = "step is not a perturbation";
      break;
    }
    if (!moved) {
      out.note = "no progress";
      break;
    }
    residual(x, rv, defect, r);
    out.defects.push_back(defect);
  }
  if (!out.converged && rv.geq(precision)) out.converged = true;
  if (!out.converged && out.note.empty()) out.note = "no convergence";
  out.point = std::move(x);
  out.residual = rv;
  return out;
}

inline bool same_point(const std::vector<Novikov>& a, const std::vector<Novikov>& b,
                       double tol) {
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a[l].val().is_infinite() != b[l].val().is_infinite()) return false;
    if (!a[l].val().is_infinite() && a[l].val().value() != b[l].val().value()) return false;
    if (!approx_equal(a[l], b[l], tol)) return false;
  }
  return true;
}

}  // namespace detail

// Root finding for the log-derivative system of an n-variable potential:
// tropical balancing for candidate valuations, complex Newton for leading
// coefficients, then Hensel lifting in truncated Novikov arithmetic.
inline std::vector<CriticalPoint> solve_critical_system(const LaurentPoly& w,
                                                        const Rational& precision,
                                                        const SolveOptions& opts = {},
                                                        SolveDiagnostics* diag = nullptr) {
  const int n = w.nvars();
  const auto eqs = detail::equation_tables(w);

  std::vector<std::vector<LaurentPoly>> jacobian(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      ExpVec dir(n, 0);
      dir[l] = 1;
      jacobian[k].push_back(log_derivative(eqs[k].poly, dir));
    }

  const auto candidates = detail::balanced_valuations(eqs, opts.candidate_cap, diag);

  std::vector<CriticalPoint> points;
  for (const auto& cand : candidates) {
    const auto leads = detail::solve_leading(eqs, cand, opts);
    for (const auto& a : leads) {
      std::vector<Novikov> seed;
      for (int l = 0; l < n; ++l)
        seed.push_back(
            Novikov::from_terms({{cand[l], a[l]}}, cand[l] + 2 * precision + 5));
      auto lift = detail::newton_lift(eqs, jacobian, std::move(seed), precision, opts);
      if (!lift.converged) {
        if (diag)
          diag->notes.push_back("candidate dropped: " + lift.note);
        continue;
      }
      bool fresh = true;
      for (const auto& p : points)
        if (detail::same_point(p.coords, lift.point, opts.dedup_tol)) fresh = false;
      if (!fresh) continue;
      CriticalPoint cp;
      cp.chart = Chart::Plus;  // caller overwrites
      cp.value = w.eval(lift.point);
      cp.coords = std::move(lift.point);
      cp.residual = lift.residual;
      cp.defect_history = std::move(lift.defects);
      points.push_back(std::move(cp));
    }
  }
  return points;
}

// Exposed for convergence experiments: lift an explicit seed.
inline detail::LiftOutcome newton_lift_from_seed(const LaurentPoly& w,
                                                 std::vector<Novikov> seed,
                                                 const Rational& precision,
                                                 const SolveOptions& opts = {}) {
  const int n = w.nvars();
  const auto eqs = detail::equation_tables(w);
  std::vector<std::vector<LaurentPoly>> jacobian(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      ExpVec dir(n, 0);
      dir[l] = 1;
      jacobian[k].push_back(log_derivative(eqs[k].poly, dir));
    }
  return detail::newton_lift(eqs, jacobian, std::move(seed), precision, opts);
}

// Substitutes x0 = 1/y_n, x1 = y_n h(ybar) into a Y-chart potential; x1 may
// only occur with nonnegative powers.
inline LaurentPoly plus_chart_from_y(const LaurentPoly& w_y, const LaurentPoly& h) {
  const int n = w_y.nvars() - 1;
  if (h.nvars() != n - 1) throw DomainError("defining polynomial arity mismatch");
  const LaurentPoly h_lift = lift_last(h);
  LaurentPoly out(n);
  for (const auto& [e, c] : w_y.terms()) {
    const int a = e[0], b = e[1];
    if (b < 0)
      throw UnsupportedFamily("negative powers of x1 do not stay polynomial in the chart");
    ExpVec ye(n, 0);
    for (int k = 0; k < n - 1; ++k) ye[k] = e[2 + k];
    ye[n - 1] = b - a;
    out = out + LaurentPoly::monomial(n, ye, c) * h_lift.pow(b);
  }
  return out;
}

// Critical points of the requested family in the requested chart.  Y-chart
// runs solve in the plus chart and push the points through the embedding.
inline std::vector<CriticalPoint> solve_critical_points(const CompactificationSpec& spec,
                                                        Chart chart,
                                                        const Rational& precision,
                                                        const SolveOptions& opts = {},
                                                        SolveDiagnostics* diag = nullptr) {
  detail::check_spec(spec);
  if (chart != Chart::Y) {
    auto points = solve_critical_system(build_superpotential(spec, chart), precision,
                                        opts, diag);
    for (auto& p : points) p.chart = chart;
    return points;
  }

  LaurentPoly h(0);
  if (spec.family == CompactificationSpec::Family::Custom) {
    if (spec.custom_chart != Chart::Y)
      throw UnsupportedFamily("custom potential is only defined in its own chart");
    if (spec.custom_h.empty())
      throw UnsupportedFamily("Y-chart custom potential needs its defining polynomial");
    h = spec.custom_h;
  } else {
    h = detail::cn_h(spec.n);
  }
  const LaurentPoly w_y = build_superpotential(spec, Chart::Y);
  const LaurentPoly w_plus = plus_chart_from_y(w_y, h);
  auto points = solve_critical_system(w_plus, precision, opts, diag);

  for (auto& p : points) {
    const Novikov yn = p.coords.back();
    std::vector<Novikov> ybar(p.coords.begin(), p.coords.end() - 1);
    std::vector<Novikov> coords;
    coords.push_back(invert(yn));
    coords.push_back(yn * h.eval(ybar));
    for (auto& y : ybar) coords.push_back(std::move(y));
    p.coords = std::move(coords);
    p.chart = Chart::Y;
  }
  return points;
}

// Closed-form c1 eigenvalue list for the supported families.
inline std::vector<Novikov> c1_eigenvalues(const CompactificationSpec& spec) {
  using Family = CompactificationSpec::Family;
  detail::check_spec(spec);
  std::vector<Novikov> values;
  if (spec.family == Family::CPn) {
    const int n = spec.n;
    for (int s = 0; s <= n; ++s) {
      const double phase = 2.0 * std::numbers::pi * s / (n + 1);
      values.push_back(
          Novikov::monomial(std::polar(static_cast<double>(n + 1), phase),
                            spec.E1 / (n + 1)));
    }
    return values;
  }
  if (spec.family == Family::CPmxCPnm) {
    const int m = spec.m, nm = spec.n - spec.m;
    for (int r = 0; r <= m; ++r)
      for (int s = 0; s <= nm; ++s) {
        const Novikov first = Novikov::monomial(
            std::polar(static_cast<double>(m + 1), 2.0 * std::numbers::pi * r / (m + 1)),
            spec.E1 / (m + 1));
        const Novikov second = Novikov::monomial(
            std::polar(static_cast<double>(nm + 1), 2.0 * std::numbers::pi * s / (nm + 1)),
            spec.E2 / (nm + 1));
        values.push_back(first + second);
      }
    return values;
  }
  throw UnsupportedFamily("c1 eigenvalues are tabulated for CPn and CPm x CPn-m only");
}

// Multiset comparison with exact exponents and coefficient tolerance.
inline bool values_match_multiset(std::vector<Novikov> a, std::vector<Novikov> b,
                                  double tol = kCoeffCompareTol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a) {
    bool matched = false;
    for (std::size_t j = 0; j < b.size() && !matched; ++j) {
      if (used[j]) continue;
      if (approx_equal(x, b[j], tol)) {
        used[j] = true;
        matched = true;
      }
    }
    if (!matched) return false;
  }
  return true;
}

struct CriticalBasePoint {
  std::vector<Rational> qbar;
  std::optional<Rational> qn;  // absent when val(x1) is infinite: the point
                               // sits on a singular fiber
  bool on_wall = false;
  bool on_hypersurface = false;
  Valuation x1_val = Valuation::infinite(Rational(0));  // psi(q) at the point
};

// Base points of Y-chart critical points under the chosen psi model: qbar is
// the valuation vector of ybar and psi(q) = val(x1).
inline std::vector<CriticalBasePoint> critical_base_points(
    const std::vector<CriticalPoint>& points, const PsiModel<Rational>& psi,
    const Tropical& h_trop) {
  std::vector<CriticalBasePoint> out;
  for (const auto& p : points) {
    if (p.chart != Chart::Y) throw DomainError("base points need Y-chart coordinates");
    CriticalBasePoint bp;
    for (std::size_t k = 2; k < p.coords.size(); ++k) {
      if (p.coords[k].is_zero()) throw DomainError("critical point has vanishing y");
      bp.qbar.push_back(p.coords[k].val().value());
    }
    bp.x1_val = p.coords[1].val();
    bp.on_hypersurface = on_tropical_hypersurface(h_trop, bp.qbar);
    if (!bp.x1_val.is_infinite()) {
      bp.qn = psi.psi_inverse(bp.qbar, bp.x1_val.value());
      bp.on_wall = *bp.qn == 0;
    }
    out.push_back(std::move(bp));
  }
  return out;
}

// E(S_a) = lambda_{n+a} - sum_j k_{aj} lambda_j for the a-th extra ray.
inline Rational sphere_energy(const ValidatedToric& data, int a) {
  if (a < 1 || a > data.r)
    throw IndexOutOfRange("extra ray index " + std::to_string(a) + " of " +
                          std::to_string(data.r));
  Rational e = data.lambdas[data.n + a - 1];
  for (int j = 0; j < data.n; ++j) e -= data.k[a - 1][j] * data.lambdas[j];
  return e;
}

}  // namespace syztrop
