#include "core/lp.hpp"

#include <cmath>

namespace skmac {

namespace {

// Pivot the tableau (rows 0..m-1 constraints, row m reduced costs) on (prow, pcol).
void pivot(std::vector<std::vector<double>>& t, std::vector<int>& basis, int prow, int pcol) {
  const int rows = static_cast<int>(t.size());
  const int cols = static_cast<int>(t[0].size());
  double pv = t[prow][pcol];
  for (int j = 0; j < cols; ++j) t[prow][j] /= pv;
  for (int i = 0; i < rows; ++i) {
    if (i == prow) continue;
    double f = t[i][pcol];
    if (f == 0.0) continue;
    for (int j = 0; j < cols; ++j) t[i][j] -= f * t[prow][j];
  }
  basis[prow] = pcol;
}

// Run Bland-rule iterations until no improving column. Maximization: improve
// while some reduced cost exceeds tol. Returns false on unboundedness.
bool iterate(std::vector<std::vector<double>>& t, std::vector<int>& basis, int nvars, double tol) {
  const int m = static_cast<int>(t.size()) - 1;
  const int rhs = static_cast<int>(t[0].size()) - 1;
  for (;;) {
    int pcol = -1;
    for (int j = 0; j < nvars; ++j)
      if (t[m][j] > tol) {
        pcol = j;
        break;
      }
    if (pcol < 0) return true;
    int prow = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t[i][pcol] > tol) {
        double ratio = t[i][rhs] / t[i][pcol];
        if (prow < 0 || ratio < best - 1e-15 ||
            (std::fabs(ratio - best) <= 1e-15 && basis[i] < basis[prow])) {
          prow = i;
          best = ratio;
        }
      }
    }
    if (prow < 0) return false;
    pivot(t, basis, prow, pcol);
  }
}

}  // namespace

LpResult simplex_solve(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                       const std::vector<double>& c, double tol) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(c.size());
  if (static_cast<int>(b.size()) != m) throw InvalidArgumentError("simplex: rhs size mismatch");
  for (const auto& row : a)
    if (static_cast<int>(row.size()) != n) throw InvalidArgumentError("simplex: row size mismatch");

  // tableau with n real vars + m artificials + rhs
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(n + m + 1, 0.0));
  for (int i = 0; i < m; ++i) {
    double sgn = (b[i] < 0.0) ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) t[i][j] = sgn * a[i][j];
    t[i][n + i] = 1.0;
    t[i][n + m] = sgn * b[i];
  }
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  // phase 1: maximize -sum(artificials); reduced cost of real j is sum_i A_ij
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += t[i][j];
    t[m][j] = s;
  }
  // the objective row keeps reduced costs and, in the rhs slot, the negated
  // objective value
  double rhs_sum = 0.0;
  for (int i = 0; i < m; ++i) rhs_sum += t[i][n + m];
  t[m][n + m] = rhs_sum;

  if (!iterate(t, basis, n + m, tol)) return {};
  if (t[m][n + m] > tol) return {};  // artificials did not vanish: infeasible

  // drive artificials out of the basis; drop redundant rows
  std::vector<int> keep_rows;
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= n) {
      int pcol = -1;
      for (int j = 0; j < n; ++j)
        if (std::fabs(t[i][j]) > tol) {
          pcol = j;
          break;
        }
      if (pcol >= 0)
        pivot(t, basis, i, pcol);
      else
        continue;  // redundant row, drop below
    }
    keep_rows.push_back(i);
  }
  if (static_cast<int>(keep_rows.size()) != m) {
    std::vector<std::vector<double>> t2;
    std::vector<int> basis2;
    for (int i : keep_rows) {
      t2.push_back(t[i]);
      basis2.push_back(basis[i]);
    }
    t2.push_back(t[m]);
    t = std::move(t2);
    basis = std::move(basis2);
  }
  const int m2 = static_cast<int>(basis.size());

  // phase 2 reduced costs over real variables only
  for (int j = 0; j <= n + m; ++j) t[m2][j] = 0.0;
  for (int j = 0; j < n; ++j) t[m2][j] = c[j];
  for (int i = 0; i < m2; ++i) {
    if (basis[i] < n && c[basis[i]] != 0.0) {
      double cb = c[basis[i]];
      for (int j = 0; j <= n + m; ++j) t[m2][j] -= cb * t[i][j];
    }
  }
  // forbid artificial columns from re-entering
  for (int j = n; j < n + m; ++j) t[m2][j] = -1.0;

  if (!iterate(t, basis, n, tol)) return {};

  LpResult res;
  res.optimal = true;
  res.x.assign(n, 0.0);
  for (int i = 0; i < m2; ++i)
    if (basis[i] < n) res.x[basis[i]] = t[i][n + m];
  double obj = 0.0;
  for (int j = 0; j < n; ++j) obj += c[j] * res.x[j];
  res.value = obj;
  return res;
}

}  // namespace skmac
