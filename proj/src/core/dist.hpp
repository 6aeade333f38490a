#ifndef SKMAC_DIST_HPP
#define SKMAC_DIST_HPP

#include <string>
#include <vector>

#include "core/common.hpp"

namespace skmac {

// Probability distribution on a finite alphabet. Entries must be nonnegative
// and sum to 1 within 1e-9; inputs within tolerance are renormalized, anything
// further off is rejected.
class FiniteDist {
 public:
  explicit FiniteDist(std::vector<double> probs);
  static FiniteDist uniform(int alphabet_size);
  static FiniteDist point_mass(int alphabet_size, int symbol);

  int alphabet_size() const { return static_cast<int>(p_.size()); }
  double prob(int x) const { return p_[x]; }
  const std::vector<double>& probs() const { return p_; }

 private:
  std::vector<double> p_;
};

// Exact joint probability table over a tuple of finite-alphabet variables.
// Dense row-major storage, last variable fastest.
class JointDist {
 public:
  JointDist(std::vector<int> arity, std::vector<double> table);

  static JointDist uniform(std::vector<int> arity);

  int num_vars() const { return static_cast<int>(arity_.size()); }
  int arity(int v) const { return arity_[v]; }
  const std::vector<int>& arities() const { return arity_; }
  std::size_t table_size() const { return table_.size(); }
  const std::vector<double>& table() const { return table_; }

  std::size_t index_of(const std::vector<int>& symbols) const;
  void symbols_of(std::size_t idx, std::vector<int>& out) const;
  std::size_t stride(int v) const { return stride_[v]; }

  // Marginal on vars, in the order given.
  JointDist marginal(const std::vector<int>& vars) const;

  // H of the marginal on vars, bits. vars must be nonempty.
  double entropy(const std::vector<int>& vars) const;

  // H(a | b) = H(a u b) - H(b). a, b disjoint; b may be empty.
  double conditional_entropy(const std::vector<int>& a, const std::vector<int>& b) const;

  // I(a ; b | given). Subsets pairwise disjoint; given may be empty.
  double mutual_information(const std::vector<int>& a, const std::vector<int>& b,
                            const std::vector<int>& given = {}) const;

  // s_in over declared key alphabet: log2|K| - H(K|F), K = kvars, F = fvars.
  double security_index(const std::vector<int>& kvars, const std::vector<int>& fvars) const;

  // Product of independent marginals on the given groups, variables reordered
  // as the concatenation of the groups.
  JointDist product_of_marginals(const std::vector<std::vector<int>>& groups) const;

  // Law conditioned on {var = value}, with that variable removed.
  JointDist condition(int var, int value) const;

  static double kl_divergence(const JointDist& p, const JointDist& q);

 private:
  void check_subset(const std::vector<int>& vars, bool allow_empty, const char* what) const;

  std::vector<int> arity_;
  std::vector<std::size_t> stride_;
  std::vector<double> table_;
};

// Two-input memoryless MAC W(x3 | x1, x2) on finite alphabets.
class MacChannel {
 public:
  // w flattened as w[x1][x2][x3]
  MacChannel(int in1, int in2, int out, std::vector<double> w);

  static MacChannel adder();                 // x3 = x1 + x2 on {0,1}^2 -> {0,1,2}
  static MacChannel xor_mac();               // x3 = x1 xor x2
  static MacChannel useless();               // output independent of inputs
  static MacChannel noisy_adder(double flip);  // adder with symbol-flip noise

  int in1_size() const { return in1_; }
  int in2_size() const { return in2_; }
  int out_size() const { return out_; }
  double w(int x1, int x2, int x3) const { return w_[(static_cast<std::size_t>(x1) * in2_ + x2) * out_ + x3]; }

  bool symmetric(double tol = kNormTol) const;

  // Exact law of (X1^n, X2^n, X3^n) under i.i.d. inputs p1, p2 and W^n,
  // grouped as three variables with product alphabets.
  JointDist pushforward(const FiniteDist& p1, const FiniteDist& p2, int n) const;

  // Sample one output symbol.
  int sample_output(int x1, int x2, Rng& rng) const;

 private:
  int in1_, in2_, out_;
  std::vector<double> w_;
};

}  // namespace skmac

#endif
