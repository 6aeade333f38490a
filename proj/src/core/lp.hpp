#ifndef SKMAC_LP_HPP
#define SKMAC_LP_HPP

#include <vector>

#include "core/common.hpp"

namespace skmac {

// Dense two-phase primal simplex with Bland's rule for
//   maximize c.x  subject to  A x = b, x >= 0.
// Problems here have at most ~62 variables and 6 rows.
struct LpResult {
  bool optimal = false;
  double value = 0.0;
  std::vector<double> x;
};

LpResult simplex_solve(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                       const std::vector<double>& c, double tol = 1e-8);

}  // namespace skmac

#endif
