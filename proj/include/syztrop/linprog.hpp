#pragma once

#include <utility>
#include <vector>

#include "syztrop/error.hpp"
#include "syztrop/rational.hpp"

namespace syztrop {

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
  LpStatus status;
  Rational value;
  std::vector<Rational> x;
};

// Two-phase tableau simplex over exact rationals, lexicographic
// (Bland-style) tie-breaking so it terminates.
//   maximize c.x  subject to  A x <= b,  x >= 0
class Simplex {
 public:
  Simplex(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b,
          const std::vector<Rational>& c)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        basis_(m_),
        nonbasis_(n_ + 1),
        tab_(m_ + 2, std::vector<Rational>(n_ + 2, Rational(0))) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) tab_[i][j] = A[i][j];
      basis_[i] = n_ + i;
      tab_[i][n_] = -1;
      tab_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      tab_[m_][j] = -c[j];
    }
    nonbasis_[n_] = -1;
    tab_[m_ + 1][n_] = 1;
  }

  LpResult solve() {
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (tab_[i][n_ + 1] < tab_[r][n_ + 1]) r = i;
    if (m_ > 0 && tab_[r][n_ + 1] < 0) {
      pivot(r, n_);
      if (!run(1) || tab_[m_ + 1][n_ + 1] < 0)
        return {LpStatus::Infeasible, Rational(0), {}};
      for (int i = 0; i < m_; ++i)
        if (basis_[i] == -1) {
          int s = -1;
          for (int j = 0; j <= n_; ++j)
            if (s == -1 || tab_[i][j] < tab_[i][s] ||
                (tab_[i][j] == tab_[i][s] && nonbasis_[j] < nonbasis_[s]))
              s = j;
          pivot(i, s);
        }
    }
    if (!run(2)) return {LpStatus::Unbounded, Rational(0), {}};
    LpResult res{LpStatus::Optimal, tab_[m_][n_ + 1], std::vector<Rational>(n_, Rational(0))};
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x[basis_[i]] = tab_[i][n_ + 1];
    return res;
  }

 private:
  void pivot(int r, int s) {
    auto& a = tab_[r];
    const Rational inv = Rational(1) / a[s];
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r && tab_[i][s] != 0) {
        auto& row = tab_[i];
        const Rational factor = row[s] * inv;
        for (int j = 0; j < n_ + 2; ++j) row[j] -= a[j] * factor;
        row[s] = a[s] * factor;
      }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) tab_[r][j] *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) tab_[i][s] *= -inv;
    tab_[r][s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  bool run(int phase) {
    const int obj = phase == 1 ? m_ + 1 : m_;
    for (;;) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        if (s == -1 || tab_[obj][j] < tab_[obj][s] ||
            (tab_[obj][j] == tab_[obj][s] && nonbasis_[j] < nonbasis_[s]))
          s = j;
      }
      if (tab_[obj][s] >= 0) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (tab_[i][s] <= 0) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const Rational lhs = tab_[i][n_ + 1] * tab_[r][s];
        const Rational rhs = tab_[r][n_ + 1] * tab_[i][s];
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  int m_, n_;
  std::vector<int> basis_, nonbasis_;
  std::vector<std::vector<Rational>> tab_;
};

inline LpResult solve_lp(const std::vector<std::vector<Rational>>& A,
                         const std::vector<Rational>& b, const std::vector<Rational>& c) {
  return Simplex(A, b, c).solve();
}

}  // namespace syztrop
