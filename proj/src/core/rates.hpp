#ifndef SKMAC_RATES_HPP
#define SKMAC_RATES_HPP

#include <vector>

#include "core/dist.hpp"

namespace skmac {

// Single-letter mutual informations defining the no-feedback pentagon.
struct PentagonRates {
  double i1;    // I(X1; X3 | X2)
  double i2;    // I(X2; X3 | X1)
  double isum;  // I(X1, X2; X3)
};

PentagonRates pentagon(const MacChannel& ch, const FiniteDist& p1, const FiniteDist& p2);

struct RstarOptions {
  int grid = 33;            // points per probability simplex dimension
  int refine_iters = 40;    // pattern-search refinement rounds
  int max_alphabet = 8;     // reject bigger input alphabets
  std::size_t max_pairs = 400000;  // cap on sampled input-distribution pairs
  std::uint64_t seed = 1;   // used only when the full grid exceeds max_pairs
};

struct RstarResult {
  double rate = 0.0;
  double uncertainty = 0.0;
  double best_single_pentagon = 0.0;  // best min(i1,i2,isum/2) over sampled inputs
  double max_isum_half = 0.0;         // ceiling: no diagonal point can beat max isum/2
  double grid_rate = 0.0;             // hull-diagonal value before refinement
  int pairs_evaluated = 0;
};

// Maximum symmetric rate of the convex hull of the union of pentagons over
// product input distributions, grid + hull + local refinement.
RstarResult compute_rstar(const MacChannel& ch, const RstarOptions& opts = {});

// min{ I(U1; X3^n,U3 | U2), I(U2; X3^n,U3 | U1), I(U1,U2; X3^n,U3)/2 } / n
// trace_law variables: (U1, U2, U3, X3^n).
double n_letter_rate_nic(const JointDist& trace_law, int n);

// Same with the source-emulation terms; trace_law variables:
// (X1^n, U1, X2^n, U2, X3^n, U3).
double n_letter_rate_se(const JointDist& trace_law, int n);

// Max t with (t,t) in the convex hull of the given points plus the origin.
double hull_diagonal_value(const std::vector<std::pair<double, double>>& points);

}  // namespace skmac

#endif
