#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "syztrop/linprog.hpp"
#include "syztrop/tropical.hpp"

namespace syztrop {

// Raw toric Calabi-Yau input: fan rays, the distinguished maximal cone,
// moment constants, and optional per-ray corrections delta_i.  Ray indices
// are 1-based throughout, matching the JSON interface.
struct ToricCY {
  std::vector<std::vector<long>> rays;       // n+r rays in Z^n
  std::vector<int> basis_cone;               // n ray indices (1-based)
  std::vector<Rational> lambdas;             // one per ray
  std::map<int, Novikov> deltas;             // ray index -> delta, val > 0
  std::map<std::string, Rational> energies;  // optional passthrough
};

// Half-space description of the moment polytope: <m, normal> + constant >= 0.
struct MomentPolytope {
  struct HalfSpace {
    std::vector<long> normal;
    Rational constant;
  };
  std::vector<HalfSpace> inequalities;
};

// Canonical form produced by validate(): basis rays first (the n-th one is
// the ray of the constant h-term), extra rays after, with the change-of-basis
// rows k[a] solved so that ray(n+a) = sum_j k[a][j] * ray(j).
struct ValidatedToric {
  int n = 0;
  int r = 0;
  std::vector<std::vector<long>> rays;
  std::vector<Rational> lambdas;
  std::vector<Novikov> deltas;          // size n+r, zero when not supplied
  std::vector<std::vector<long>> k;     // r rows of n integers
  std::map<std::string, Rational> energies;

  MomentPolytope polytope() const {
    MomentPolytope p;
    for (std::size_t i = 0; i < rays.size(); ++i)
      p.inequalities.push_back({rays[i], lambdas[i]});
    return p;
  }
};

namespace detail {

// Solves M x = rhs exactly (square, via Gauss-Jordan); returns false when
// singular.
inline bool solve_rational_system(std::vector<std::vector<Rational>> M,
                                  std::vector<Rational> rhs, std::vector<Rational>& out) {
  const int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int row = col; row < n; ++row)
      if (M[row][col] != 0) {
        piv = row;
        break;
      }
    if (piv < 0) return false;
    std::swap(M[piv], M[col]);
    std::swap(rhs[piv], rhs[col]);
    const Rational inv = Rational(1) / M[col][col];
    for (int j = 0; j < n; ++j) M[col][j] *= inv;
    rhs[col] *= inv;
    for (int row = 0; row < n; ++row) {
      if (row == col || M[row][col] == 0) continue;
      const Rational f = M[row][col];
      for (int j = 0; j < n; ++j) M[row][j] -= f * M[col][j];
      rhs[row] -= f * rhs[col];
    }
  }
  out = std::move(rhs);
  return true;
}

inline mpz_class integer_det(const std::vector<std::vector<long>>& rows) {
  const int n = static_cast<int>(rows.size());
  std::vector<std::vector<Rational>> M(n, std::vector<Rational>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M[i][j] = rows[i][j];
  Rational det = 1;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int row = col; row < n; ++row)
      if (M[row][col] != 0) {
        piv = row;
        break;
      }
    if (piv < 0) return 0;
    if (piv != col) {
      std::swap(M[piv], M[col]);
      det = -det;
    }
    det *= M[col][col];
    const Rational inv = Rational(1) / M[col][col];
    for (int j = col; j < n; ++j) M[col][j] *= inv;
    for (int row = col + 1; row < n; ++row) {
      if (M[row][col] == 0) continue;
      const Rational f = M[row][col];
      for (int j = col; j < n; ++j) M[row][j] -= f * M[col][j];
    }
  }
  return det.get_num();  // denominator is 1 by construction
}

}  // namespace detail

inline ValidatedToric validate(const ToricCY& data) {
  const int total = static_cast<int>(data.rays.size());
  if (total == 0) throw DegenerateInput("toric data has no rays");
  const int n = static_cast<int>(data.rays.front().size());
  for (const auto& v : data.rays)
    if (static_cast<int>(v.size()) != n) throw DomainError("ray dimension mismatch");
  if (static_cast<int>(data.lambdas.size()) != total)
    throw DomainError("lambdas must match rays");
  if (static_cast<int>(data.basis_cone.size()) != n)
    throw DomainError("basis cone must name n rays");

  std::set<int> basis_set;
  for (int idx : data.basis_cone) {
    if (idx < 1 || idx > total) throw DomainError("basis cone index out of range");
    if (!basis_set.insert(idx).second) throw DomainError("repeated basis cone index");
  }

  ValidatedToric out;
  out.n = n;
  out.r = total - n;
  out.energies = data.energies;

  // basis rays first, remaining rays in input order
  std::vector<int> order(data.basis_cone.begin(), data.basis_cone.end());
  for (int i = 1; i <= total; ++i)
    if (!basis_set.count(i)) order.push_back(i);
  for (int idx : order) {
    out.rays.push_back(data.rays[idx - 1]);
    out.lambdas.push_back(data.lambdas[idx - 1]);
    auto it = data.deltas.find(idx);
    out.deltas.push_back(it == data.deltas.end() ? Novikov::zero() : it->second);
  }

  const mpz_class det = detail::integer_det(
      std::vector<std::vector<long>>(out.rays.begin(), out.rays.begin() + n));
  if (det != 1 && det != -1)
    throw NotSmooth("basis cone determinant is " + det.get_str() + ", expected +-1");

  // k rows: ray(n+a) = sum_j k[a][j] ray(j); Calabi-Yau forces row sum 1
  std::vector<std::vector<Rational>> M(n, std::vector<Rational>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M[i][j] = out.rays[j][i];
  for (int a = 0; a < out.r; ++a) {
    std::vector<Rational> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = out.rays[n + a][i];
    std::vector<Rational> sol;
    if (!detail::solve_rational_system(M, rhs, sol))
      throw NotSmooth("basis cone is degenerate");
    std::vector<long> row(n);
    Rational row_sum = 0;
    for (int j = 0; j < n; ++j) {
      if (sol[j].get_den() != 1 || !sol[j].get_num().fits_slong_p())
        throw NotSmooth("ray " + std::to_string(n + a + 1) + " is not an integer combination");
      row[j] = sol[j].get_num().get_si();
      row_sum += sol[j];
    }
    if (row_sum != 1)
      throw NotCalabiYau("<m0, v> = " + to_string(row_sum) + " != 1 for ray " +
                         std::to_string(n + a + 1));
    out.k.push_back(std::move(row));
  }

  for (std::size_t i = 0; i < out.deltas.size(); ++i)
    if (!out.deltas[i].is_zero() && !out.deltas[i].val().gt(Rational(0)))
      throw BadDelta("delta for ray " + std::to_string(i + 1) + " must have val > 0");

  return out;
}

// Tropical terms in ray order: ray s (s<n) contributes (lambda_s, e_s),
// ray n the constant, ray n+a the k-row.  Term index i therefore names
// ray i+1, which is what Wall(k) tags and the divisor detection rely on.
inline Tropical build_h_trop(const ValidatedToric& d) {
  std::vector<Tropical::Term> terms;
  const int m = d.n - 1;
  for (int s = 0; s < m; ++s) {
    ExpVec e(m, 0);
    e[s] = 1;
    terms.push_back({d.lambdas[s], e});
  }
  terms.push_back({d.lambdas[d.n - 1], ExpVec(m, 0)});
  for (int a = 0; a < d.r; ++a) {
    ExpVec e(d.k[a].begin(), d.k[a].begin() + m);
    terms.push_back({d.lambdas[d.n + a], e});
  }
  return Tropical(m, std::move(terms));
}

// Divisor D_i is compact exactly when the cell of the tropical complement
// where term i uniquely minimizes is nonempty and bounded; both questions
// are decided by exact LPs.
inline std::set<int> detect_compact_divisors(const ValidatedToric& d) {
  const Tropical h_trop = build_h_trop(d);
  const auto& terms = h_trop.terms();
  const int m = h_trop.nvars();
  const int nterms = static_cast<int>(terms.size());
  std::set<int> compact;

  for (int i = 0; i < nterms; ++i) {
    // Nonempty interior: maximize t with
    //   <e_i - e_j, q> + t <= const_j - const_i  for all j != i, t <= 1
    // over free q (split into q+ - q-).
    {
      std::vector<std::vector<Rational>> A;
      std::vector<Rational> b;
      for (int j = 0; j < nterms; ++j) {
        if (j == i) continue;
        std::vector<Rational> row(2 * m + 1, Rational(0));
        for (int kk = 0; kk < m; ++kk) {
          const long diff = terms[i].exps[kk] - terms[j].exps[kk];
          row[kk] = diff;
          row[m + kk] = -diff;
        }
        row[2 * m] = 1;
        A.push_back(std::move(row));
        b.push_back(terms[j].constant - terms[i].constant);
      }
      {
        std::vector<Rational> row(2 * m + 1, Rational(0));
        row[2 * m] = 1;
        A.push_back(std::move(row));
        b.push_back(Rational(1));
      }
      std::vector<Rational> c(2 * m + 1, Rational(0));
      c[2 * m] = 1;
      const LpResult res = solve_lp(A, b, c);
      if (res.status != LpStatus::Optimal || !(res.value > 0)) continue;  // empty cell
    }

    // Trivial recession cone: every +-coordinate optimum over
    //   <e_i - e_j, dir> <= 0, -1 <= dir <= 1
    // must be 0.
    bool bounded = true;
    for (int axis = 0; axis < m && bounded; ++axis) {
      for (int sign = 0; sign < 2 && bounded; ++sign) {
        std::vector<std::vector<Rational>> A;
        std::vector<Rational> b;
        for (int j = 0; j < nterms; ++j) {
          if (j == i) continue;
          std::vector<Rational> row(2 * m, Rational(0));
          for (int kk = 0; kk < m; ++kk) {
            const long diff = terms[i].exps[kk] - terms[j].exps[kk];
            row[kk] = diff;
            row[m + kk] = -diff;
          }
          A.push_back(std::move(row));
          b.push_back(Rational(0));
        }
        for (int kk = 0; kk < m; ++kk) {
          std::vector<Rational> rp(2 * m, Rational(0)), rn(2 * m, Rational(0));
          rp[kk] = 1;
          rp[m + kk] = -1;
          rn[kk] = -1;
          rn[m + kk] = 1;
          A.push_back(rp);
          b.push_back(Rational(1));
          A.push_back(rn);
          b.push_back(Rational(1));
        }
        std::vector<Rational> c(2 * m, Rational(0));
        c[axis] = sign == 0 ? 1 : -1;
        c[m + axis] = sign == 0 ? -1 : 1;
        const LpResult res = solve_lp(A, b, c);
        if (res.status != LpStatus::Optimal || res.value > 0) bounded = false;
      }
    }
    if (bounded) compact.insert(i + 1);
  }
  return compact;
}

struct BuildHOptions {
  bool require_delta_for_compact = true;
  bool allow_delta_on_noncompact = false;
};

// h = T^{l_n}(1+d_n) + sum_s T^{l_s} y_s (1+d_s)
//       + sum_a T^{l_{n+a}} (1+d_{n+a}) prod_s y_s^{k_as}
inline LaurentPoly build_h(const ValidatedToric& d, const BuildHOptions& opts = {}) {
  const int m = d.n - 1;

  bool any_delta = false;
  for (const auto& delta : d.deltas) any_delta |= !delta.is_zero();
  if (opts.require_delta_for_compact || any_delta) {
    const std::set<int> compact = detect_compact_divisors(d);
    if (opts.require_delta_for_compact)
      for (int i : compact)
        if (d.deltas[i - 1].is_zero())
          throw CompactDivisorWithoutDelta("divisor of ray " + std::to_string(i) +
                                           " is compact and no delta was supplied");
    if (!opts.allow_delta_on_noncompact)
      for (std::size_t i = 0; i < d.deltas.size(); ++i)
        if (!d.deltas[i].is_zero() && !compact.count(static_cast<int>(i) + 1))
          throw BadDelta("ray " + std::to_string(i + 1) +
                         " bounds a non-compact divisor; its delta must vanish");
  }

  LaurentPoly h(m);
  auto coeff = [&](int ray_index_0) {
    return Novikov::monomial({1.0, 0.0}, d.lambdas[ray_index_0]) *
           (Novikov::one() + d.deltas[ray_index_0]);
  };
  for (int s = 0; s < m; ++s) {
    ExpVec e(m, 0);
    e[s] = 1;
    h.add_term(e, coeff(s));
  }
  h.add_term(ExpVec(m, 0), coeff(d.n - 1));
  for (int a = 0; a < d.r; ++a) {
    ExpVec e(d.k[a].begin(), d.k[a].begin() + m);
    h.add_term(e, coeff(d.n + a));
  }
  return h;
}

// Reads the fan and moment data back from a Laurent polynomial: the
// polytope q_n + trop(h) >= 0, sheared by q -> (qbar + qn*1, qn), yields
// one ray (e, 1 - sum e) with constant val(coeff) per term.
struct ConverseResult {
  ToricCY data;
  MomentPolytope polytope;
};

inline ConverseResult syz_converse(const LaurentPoly& h) {
  if (h.size() < 2) throw DegenerateInput("h needs at least two terms");
  const int m = h.nvars();
  const int n = m + 1;
  const Tropical trop = tropicalize(h);

  struct Ray {
    std::vector<long> v;
    Rational lambda;
    bool is_unit = false;
    int unit_index = -1;  // which y_s, when the term is linear in a single variable
    bool is_const = false;
  };
  std::vector<Ray> rays;
  for (const auto& t : trop.terms()) {
    Ray ray;
    long esum = 0;
    ray.v.resize(n);
    for (int i = 0; i < m; ++i) {
      ray.v[i] = t.exps[i];
      esum += t.exps[i];
    }
    ray.v[m] = 1 - esum;
    ray.lambda = t.constant;
    ray.is_const = (esum == 0);
    for (int i = 0; i < m && ray.is_const; ++i) ray.is_const = (t.exps[i] == 0);
    if (!ray.is_const && esum == 1) {
      int nonzero = -1, count = 0;
      for (int i = 0; i < m; ++i)
        if (t.exps[i] != 0) {
          nonzero = i;
          ++count;
        }
      if (count == 1 && t.exps[nonzero] == 1) {
        ray.is_unit = true;
        ray.unit_index = nonzero;
      }
    }
    rays.push_back(std::move(ray));
  }

  // canonical order: the unit terms give rays 1..n-1, the constant term the
  // n-th ray, remaining terms after
  std::vector<int> order(n, -1);
  std::vector<int> rest;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (rays[i].is_unit && order[rays[i].unit_index] < 0)
      order[rays[i].unit_index] = static_cast<int>(i);
    else if (rays[i].is_const && order[m] < 0)
      order[m] = static_cast<int>(i);
    else
      rest.push_back(static_cast<int>(i));
  }
  for (int i = 0; i < n; ++i)
    if (order[i] < 0)
      throw DegenerateInput(
          i == m ? "h has no constant term to anchor the n-th ray"
                 : "h is missing the linear term in variable " + std::to_string(i + 1));

  ConverseResult res;
  for (int idx : order) {
    res.data.rays.push_back(rays[idx].v);
    res.data.lambdas.push_back(rays[idx].lambda);
  }
  for (int idx : rest) {
    res.data.rays.push_back(rays[idx].v);
    res.data.lambdas.push_back(rays[idx].lambda);
  }
  for (int i = 1; i <= n; ++i) res.data.basis_cone.push_back(i);
  for (std::size_t i = 0; i < res.data.rays.size(); ++i)
    res.polytope.inequalities.push_back({res.data.rays[i], res.data.lambdas[i]});
  return res;
}

// Standard C^n data: rays the standard basis, r = 0, lambda = 0.
inline ToricCY standard_cn(int n) {
  ToricCY d;
  for (int i = 0; i < n; ++i) {
    std::vector<long> v(n, 0);
    v[i] = 1;
    d.rays.push_back(std::move(v));
    d.basis_cone.push_back(i + 1);
    d.lambdas.push_back(Rational(0));
  }
  return d;
}

}  // namespace syztrop
