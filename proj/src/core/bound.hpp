#ifndef SKMAC_BOUND_HPP
#define SKMAC_BOUND_HPP

#include <optional>
#include <vector>

#include "core/dist.hpp"
#include "core/partition.hpp"

namespace skmac {

struct ConverseBoundResult {
  double bound_bits = 0.0;  // h_total - penalty + s_in + nu
  double h_total = 0.0;
  double penalty = 0.0;
  double s_in = 0.0;
  double nu = 0.0;
  double log_k = 0.0;
  // corollary form (1/(k-1)) D(P_{Y_M} || prod P_{Y_pi}) + s_in + nu,
  // present when lambda was induced by a partition
  std::optional<double> corollary_bound;
};

// One-shot converse for a source-model law. y_groups[i] lists the law
// variables forming terminal i's observation; k_vars the key; f_vars the
// transcript. eps in [0,1).
ConverseBoundResult one_shot_bound(const JointDist& law, const std::vector<std::vector<int>>& y_groups,
                                   const std::vector<int>& k_vars, const std::vector<int>& f_vars,
                                   const FractionalPartition& lam, double eps);

// Same with lambda = lambda^pi; also fills corollary_bound.
ConverseBoundResult one_shot_bound(const JointDist& law, const std::vector<std::vector<int>>& y_groups,
                                   const std::vector<int>& k_vars, const std::vector<int>& f_vars,
                                   const Partition& pi, double eps);

// Tightest penalty over fractional partitions: LP max of
// sum_B lambda_B H(Y_B | Y_B^c) under the covering constraints.
struct BestBound {
  FractionalPartition lam;
  double penalty = 0.0;
};
BestBound best_bound_lp(const JointDist& law, const std::vector<std::vector<int>>& y_groups);

// Picks the lowest transcript value f1 with
//   P(K1 = K2 = K3 = K | F1 = f1) >= 1 - 2 eps
//   log|K| - H(K | F_rest, F1 = f1) <= 2 eps
// and returns it with the law conditioned on F1 = f1 (F1 removed).
struct F1Reduction {
  int f1_star = 0;
  JointDist conditioned;
};
F1Reduction f1_constant_reduction(const JointDist& law, int f1_var, const std::vector<int>& k1_vars,
                                  const std::vector<int>& k2_vars, const std::vector<int>& k3_vars,
                                  const std::vector<int>& k_vars, const std::vector<int>& f_rest_vars,
                                  double eps);

}  // namespace skmac

#endif
