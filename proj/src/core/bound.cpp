#include "core/bound.hpp"

#include <cmath>

#include "core/lp.hpp"

namespace skmac {

namespace {

std::vector<int> vars_of_mask(const std::vector<std::vector<int>>& groups, std::uint32_t mask) {
  std::vector<int> vars;
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (mask & (1u << i)) vars.insert(vars.end(), groups[i].begin(), groups[i].end());
  return vars;
}

double log_k_of(const JointDist& law, const std::vector<int>& k_vars) {
  double lk = 0.0;
  for (int v : k_vars) lk += std::log2(static_cast<double>(law.arity(v)));
  return lk;
}

ConverseBoundResult bound_impl(const JointDist& law, const std::vector<std::vector<int>>& y_groups,
                               const std::vector<int>& k_vars, const std::vector<int>& f_vars,
                               const FractionalPartition& lam, double eps) {
  const int m = static_cast<int>(y_groups.size());
  if (m < 2) throw InvalidArgumentError("one_shot_bound: need at least 2 terminals");
  if (lam.m != m) throw InvalidArgumentError("one_shot_bound: partition size mismatch");
  if (!lam.valid()) throw InvalidArgumentError("one_shot_bound: invalid fractional partition");
  if (eps < 0.0 || eps >= 1.0) throw InvalidArgumentError("one_shot_bound: eps out of range");

  ConverseBoundResult r;
  std::vector<int> all = vars_of_mask(y_groups, (1u << m) - 1);
  r.h_total = law.entropy(all);
  std::uint32_t full = (1u << m) - 1;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    double w = lam.weight(mask);
    if (w == 0.0) continue;
    std::vector<int> b = vars_of_mask(y_groups, mask);
    std::vector<int> bc = vars_of_mask(y_groups, full ^ mask);
    r.penalty += w * law.conditional_entropy(b, bc);
  }
  r.s_in = law.security_index(k_vars, f_vars);
  r.log_k = log_k_of(law, k_vars);
  r.nu = (m + 2) * (eps * r.log_k + binary_entropy(eps));
  r.bound_bits = r.h_total - r.penalty + r.s_in + r.nu;
  return r;
}

}  // namespace

ConverseBoundResult one_shot_bound(const JointDist& law, const std::vector<std::vector<int>>& y_groups,
                                   const std::vector<int>& k_vars, const std::vector<int>& f_vars,
                                   const FractionalPartition& lam, double eps) {
  return bound_impl(law, y_groups, k_vars, f_vars, lam, eps);
}

ConverseBoundResult one_shot_bound(const JointDist& law, const std::vector<std::vector<int>>& y_groups,
                                   const std::vector<int>& k_vars, const std::vector<int>& f_vars,
                                   const Partition& pi, double eps) {
  ConverseBoundResult r = bound_impl(law, y_groups, k_vars, f_vars, partition_to_fractional(pi), eps);
  // corollary: (1/(k-1)) D(P_{Y_M} || prod_i P_{Y_pi_i}) + s_in + nu
  std::vector<std::vector<int>> blocks;
  std::vector<int> order;
  for (std::uint32_t b : pi.blocks) {
    std::vector<int> vars = vars_of_mask(y_groups, b);
    order.insert(order.end(), vars.begin(), vars.end());
    blocks.push_back(std::move(vars));
  }
  JointDist joint = law.marginal(order);
  JointDist prod = law.product_of_marginals(blocks);
  double d = JointDist::kl_divergence(joint, prod);
  double k = static_cast<double>(pi.blocks.size());
  r.corollary_bound = d / (k - 1.0) + r.s_in + r.nu;
  return r;
}

BestBound best_bound_lp(const JointDist& law, const std::vector<std::vector<int>>& y_groups) {
  const int m = static_cast<int>(y_groups.size());
  if (m < 2 || m > 6) throw InvalidArgumentError("best_bound_lp: m must be in [2,6]");

  std::uint32_t full = (1u << m) - 1;
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 1; mask < full; ++mask) masks.push_back(mask);

  std::vector<double> c(masks.size());
  for (std::size_t j = 0; j < masks.size(); ++j) {
    std::vector<int> b = vars_of_mask(y_groups, masks[j]);
    std::vector<int> bc = vars_of_mask(y_groups, full ^ masks[j]);
    c[j] = law.conditional_entropy(b, bc);
  }
  std::vector<std::vector<double>> a(m, std::vector<double>(masks.size(), 0.0));
  std::vector<double> rhs(m, 1.0);
  for (int i = 0; i < m; ++i)
    for (std::size_t j = 0; j < masks.size(); ++j)
      if (masks[j] & (1u << i)) a[i][j] = 1.0;

  LpResult lp = simplex_solve(a, rhs, c, 1e-8);
  if (!lp.optimal) throw InternalError("best_bound_lp: LP did not solve (infeasibility impossible by construction)");

  BestBound out;
  out.lam.m = m;
  out.lam.weights.assign(static_cast<std::size_t>(1) << m, 0.0);
  for (std::size_t j = 0; j < masks.size(); ++j) {
    double w = lp.x[j];
    if (w < 0.0 && w > -1e-8) w = 0.0;
    if (w > 1.0 && w < 1.0 + 1e-8) w = 1.0;
    out.lam.weights[masks[j]] = w;
  }
  if (!out.lam.valid(1e-7)) throw InternalError("best_bound_lp: LP solution violates covering constraints");
  out.penalty = lp.value;
  return out;
}

F1Reduction f1_constant_reduction(const JointDist& law, int f1_var, const std::vector<int>& k1_vars,
                                  const std::vector<int>& k2_vars, const std::vector<int>& k3_vars,
                                  const std::vector<int>& k_vars, const std::vector<int>& f_rest_vars,
                                  double eps) {
  if (eps < 0.0 || eps >= 1.0) throw InvalidArgumentError("f1_constant_reduction: eps out of range");
  auto same_profile = [&](const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (law.arity(a[i]) != law.arity(b[i])) return false;
    return true;
  };
  if (!same_profile(k1_vars, k_vars) || !same_profile(k2_vars, k_vars) || !same_profile(k3_vars, k_vars))
    throw InvalidArgumentError("f1_constant_reduction: key estimate alphabets differ");

  double log_k = log_k_of(law, k_vars);
  std::vector<int> sym(law.num_vars());

  const int f1_arity = law.arity(f1_var);
  // P(F1=f1) and P(all keys agree, F1=f1)
  std::vector<double> pf1(f1_arity, 0.0), pagree(f1_arity, 0.0);
  for (std::size_t idx = 0; idx < law.table_size(); ++idx) {
    double p = law.table()[idx];
    if (p == 0.0) continue;
    law.symbols_of(idx, sym);
    pf1[sym[f1_var]] += p;
    bool agree = true;
    for (std::size_t i = 0; i < k_vars.size() && agree; ++i) {
      int kv = sym[k_vars[i]];
      agree = sym[k1_vars[i]] == kv && sym[k2_vars[i]] == kv && sym[k3_vars[i]] == kv;
    }
    if (agree) pagree[sym[f1_var]] += p;
  }

  for (int f1 = 0; f1 < f1_arity; ++f1) {
    if (pf1[f1] <= 0.0) continue;
    if (pagree[f1] / pf1[f1] < 1.0 - 2.0 * eps - 1e-12) continue;
    JointDist cond = law.condition(f1_var, f1);
    // variable indices shift down past f1_var
    auto remap = [&](const std::vector<int>& vars) {
      std::vector<int> out;
      for (int v : vars) out.push_back(v > f1_var ? v - 1 : v);
      return out;
    };
    double s = log_k - cond.conditional_entropy(remap(k_vars), remap(f_rest_vars));
    if (s <= 2.0 * eps + 1e-12) return F1Reduction{f1, std::move(cond)};
  }
  throw InvalidArgumentError(
      "f1_constant_reduction: no qualifying f1 (recoverability/security premises violated)");
}

}  // namespace skmac
