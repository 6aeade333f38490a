#include "core/dist.hpp"

#include <algorithm>
#include <cmath>

namespace skmac {

namespace {

void normalize_or_reject(std::vector<double>& p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw InvalidArgumentError(std::string(what) + ": negative probability entry");
    if (!std::isfinite(v)) throw InvalidArgumentError(std::string(what) + ": non-finite entry");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > kNormTol)
    throw InvalidArgumentError(std::string(what) + ": mass " + std::to_string(sum) + " not 1 within 1e-9");
  if (sum > 0.0)
    for (double& v : p) v /= sum;
}

}  // namespace

FiniteDist::FiniteDist(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.empty()) throw InvalidArgumentError("FiniteDist: empty alphabet");
  normalize_or_reject(p_, "FiniteDist");
}

FiniteDist FiniteDist::uniform(int alphabet_size) {
  if (alphabet_size <= 0) throw InvalidArgumentError("FiniteDist::uniform: bad alphabet");
  return FiniteDist(std::vector<double>(alphabet_size, 1.0 / alphabet_size));
}

FiniteDist FiniteDist::point_mass(int alphabet_size, int symbol) {
  if (symbol < 0 || symbol >= alphabet_size) throw InvalidArgumentError("FiniteDist::point_mass: bad symbol");
  std::vector<double> p(alphabet_size, 0.0);
  p[symbol] = 1.0;
  return FiniteDist(std::move(p));
}

JointDist::JointDist(std::vector<int> arity, std::vector<double> table)
    : arity_(std::move(arity)), table_(std::move(table)) {
  if (arity_.empty()) throw InvalidArgumentError("JointDist: no variables");
  std::size_t total = 1;
  for (int a : arity_) {
    if (a <= 0) throw InvalidArgumentError("JointDist: nonpositive arity");
    if (total > memory_budget_entries() / static_cast<std::size_t>(a))
      throw BudgetError("JointDist: table exceeds memory budget");
    total *= static_cast<std::size_t>(a);
  }
  if (table_.size() != total) throw InvalidArgumentError("JointDist: table size mismatch");
  normalize_or_reject(table_, "JointDist");
  stride_.assign(arity_.size(), 1);
  for (int v = static_cast<int>(arity_.size()) - 2; v >= 0; --v)
    stride_[v] = stride_[v + 1] * static_cast<std::size_t>(arity_[v + 1]);
}

JointDist JointDist::uniform(std::vector<int> arity) {
  std::size_t total = 1;
  for (int a : arity) total *= static_cast<std::size_t>(a);
  return JointDist(std::move(arity), std::vector<double>(total, 1.0 / static_cast<double>(total)));
}

std::size_t JointDist::index_of(const std::vector<int>& symbols) const {
  std::size_t idx = 0;
  for (std::size_t v = 0; v < arity_.size(); ++v) idx += stride_[v] * static_cast<std::size_t>(symbols[v]);
  return idx;
}

void JointDist::symbols_of(std::size_t idx, std::vector<int>& out) const {
  out.resize(arity_.size());
  for (std::size_t v = 0; v < arity_.size(); ++v) {
    out[v] = static_cast<int>(idx / stride_[v]);
    idx %= stride_[v];
  }
}

void JointDist::check_subset(const std::vector<int>& vars, bool allow_empty, const char* what) const {
  if (vars.empty() && !allow_empty) throw InvalidArgumentError(std::string(what) + ": empty variable subset");
  std::vector<bool> seen(arity_.size(), false);
  for (int v : vars) {
    if (v < 0 || v >= num_vars()) throw InvalidArgumentError(std::string(what) + ": variable index out of range");
    if (seen[v]) throw InvalidArgumentError(std::string(what) + ": repeated variable");
    seen[v] = true;
  }
}

JointDist JointDist::marginal(const std::vector<int>& vars) const {
  check_subset(vars, false, "marginal");
  std::vector<int> m_arity(vars.size());
  std::size_t m_total = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    m_arity[i] = arity_[vars[i]];
    m_total *= static_cast<std::size_t>(m_arity[i]);
  }
  std::vector<std::size_t> m_stride(vars.size(), 1);
  for (int i = static_cast<int>(vars.size()) - 2; i >= 0; --i)
    m_stride[i] = m_stride[i + 1] * static_cast<std::size_t>(m_arity[i + 1]);

  std::vector<double> m_table(m_total, 0.0);
  std::vector<int> sym(arity_.size());
  for (std::size_t idx = 0; idx < table_.size(); ++idx) {
    if (table_[idx] == 0.0) continue;
    std::size_t rem = idx, midx = 0;
    for (std::size_t v = 0; v < arity_.size(); ++v) {
      sym[v] = static_cast<int>(rem / stride_[v]);
      rem %= stride_[v];
    }
    for (std::size_t i = 0; i < vars.size(); ++i) midx += m_stride[i] * static_cast<std::size_t>(sym[vars[i]]);
    m_table[midx] += table_[idx];
  }
  return JointDist(std::move(m_arity), std::move(m_table));
}

double JointDist::entropy(const std::vector<int>& vars) const {
  check_subset(vars, false, "entropy");
  if (vars.size() == arity_.size()) {
    // full-table entropy without building a marginal
    bool full = true;
    std::vector<bool> seen(arity_.size(), false);
    for (int v : vars) seen[v] = true;
    for (bool s : seen) full = full && s;
    if (full) {
      double h = 0.0;
      for (double p : table_) h -= xlog2x(p);
      return h < 0.0 ? 0.0 : h;
    }
  }
  JointDist m = marginal(vars);
  double h = 0.0;
  for (double p : m.table_) h -= xlog2x(p);
  return h < 0.0 ? 0.0 : h;
}

double JointDist::conditional_entropy(const std::vector<int>& a, const std::vector<int>& b) const {
  check_subset(a, false, "conditional_entropy");
  check_subset(b, true, "conditional_entropy");
  for (int va : a)
    for (int vb : b)
      if (va == vb) throw InvalidArgumentError("conditional_entropy: overlapping subsets");
  std::vector<int> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  double h_ab = entropy(ab);
  double h_b = b.empty() ? 0.0 : entropy(b);
  return h_ab - h_b;
}

double JointDist::mutual_information(const std::vector<int>& a, const std::vector<int>& b,
                                     const std::vector<int>& given) const {
  check_subset(a, false, "mutual_information");
  check_subset(b, false, "mutual_information");
  check_subset(given, true, "mutual_information");
  auto disjoint = [](const std::vector<int>& x, const std::vector<int>& y) {
    for (int vx : x)
      for (int vy : y)
        if (vx == vy) return false;
    return true;
  };
  if (!disjoint(a, b) || !disjoint(a, given) || !disjoint(b, given))
    throw InvalidArgumentError("mutual_information: subsets overlap");
  std::vector<int> b_given = b;
  b_given.insert(b_given.end(), given.begin(), given.end());
  double mi = conditional_entropy(a, given) - conditional_entropy(a, b_given);
  if (mi < -1e-9) throw InternalError("mutual_information: negative beyond tolerance");
  return mi < 0.0 ? 0.0 : mi;
}

double JointDist::security_index(const std::vector<int>& kvars, const std::vector<int>& fvars) const {
  check_subset(kvars, false, "security_index");
  check_subset(fvars, true, "security_index");
  double log_k = 0.0;
  for (int v : kvars) log_k += std::log2(static_cast<double>(arity_[v]));
  double s = log_k - conditional_entropy(kvars, fvars);
  if (s < -1e-9) throw InternalError("security_index: negative beyond tolerance");
  return s < 0.0 ? 0.0 : s;
}

JointDist JointDist::product_of_marginals(const std::vector<std::vector<int>>& groups) const {
  if (groups.empty()) throw InvalidArgumentError("product_of_marginals: no groups");
  std::vector<JointDist> margs;
  std::vector<int> all;
  for (const auto& g : groups) {
    margs.push_back(marginal(g));
    all.insert(all.end(), g.begin(), g.end());
  }
  check_subset(all, false, "product_of_marginals");
  std::vector<int> arity;
  for (const auto& m : margs) arity.insert(arity.end(), m.arities().begin(), m.arities().end());
  std::size_t total = 1;
  for (int a : arity) total *= static_cast<std::size_t>(a);
  if (total > memory_budget_entries()) throw BudgetError("product_of_marginals: exceeds memory budget");
  std::vector<double> table(total, 0.0);
  std::vector<int> sym(arity.size());
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int v = static_cast<int>(arity.size()) - 1; v >= 0; --v) {
      sym[v] = static_cast<int>(rem % static_cast<std::size_t>(arity[v]));
      rem /= static_cast<std::size_t>(arity[v]);
    }
    double p = 1.0;
    std::size_t off = 0;
    for (const auto& m : margs) {
      std::vector<int> gs(sym.begin() + off, sym.begin() + off + m.num_vars());
      p *= m.table()[m.index_of(gs)];
      off += m.num_vars();
    }
    table[idx] = p;
  }
  return JointDist(std::move(arity), std::move(table));
}

JointDist JointDist::condition(int var, int value) const {
  if (var < 0 || var >= num_vars()) throw InvalidArgumentError("condition: variable out of range");
  if (value < 0 || value >= arity_[var]) throw InvalidArgumentError("condition: value out of range");
  if (num_vars() < 2) throw InvalidArgumentError("condition: cannot remove the only variable");
  std::vector<int> rest;
  for (int v = 0; v < num_vars(); ++v)
    if (v != var) rest.push_back(v);
  std::vector<int> new_arity;
  for (int v : rest) new_arity.push_back(arity_[v]);
  std::size_t total = 1;
  for (int a : new_arity) total *= static_cast<std::size_t>(a);
  std::vector<double> table(total, 0.0);
  std::vector<int> sym(arity_.size());
  double mass = 0.0;
  for (std::size_t idx = 0; idx < table_.size(); ++idx) {
    if (table_[idx] == 0.0) continue;
    symbols_of(idx, sym);
    if (sym[var] != value) continue;
    std::size_t nidx = 0;
    for (int v : rest) nidx = nidx * static_cast<std::size_t>(arity_[v]) + static_cast<std::size_t>(sym[v]);
    table[nidx] += table_[idx];
    mass += table_[idx];
  }
  if (mass <= 0.0) throw InvalidArgumentError("condition: conditioning event has zero probability");
  for (auto& v : table) v /= mass;
  return JointDist(std::move(new_arity), std::move(table));
}

double JointDist::kl_divergence(const JointDist& p, const JointDist& q) {
  if (p.arities() != q.arities()) throw InvalidArgumentError("kl_divergence: shape mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.table_.size(); ++i) {
    double pi = p.table_[i], qi = q.table_[i];
    if (pi == 0.0) continue;
    if (qi == 0.0) return std::numeric_limits<double>::infinity();
    d += pi * std::log2(pi / qi);
  }
  return d < 0.0 ? 0.0 : d;
}

MacChannel::MacChannel(int in1, int in2, int out, std::vector<double> w)
    : in1_(in1), in2_(in2), out_(out), w_(std::move(w)) {
  if (in1_ <= 0 || in2_ <= 0 || out_ <= 0) throw InvalidArgumentError("MacChannel: nonpositive alphabet");
  if (w_.size() != static_cast<std::size_t>(in1_) * in2_ * out_)
    throw InvalidArgumentError("MacChannel: table size mismatch");
  for (int x1 = 0; x1 < in1_; ++x1)
    for (int x2 = 0; x2 < in2_; ++x2) {
      double sum = 0.0;
      for (int x3 = 0; x3 < out_; ++x3) {
        double v = w_[(static_cast<std::size_t>(x1) * in2_ + x2) * out_ + x3];
        if (v < 0.0 || !std::isfinite(v)) throw InvalidArgumentError("MacChannel: bad entry");
        sum += v;
      }
      if (std::fabs(sum - 1.0) > kNormTol)
        throw InvalidArgumentError("MacChannel: row (" + std::to_string(x1) + "," + std::to_string(x2) +
                                   ") mass not 1 within 1e-9");
      for (int x3 = 0; x3 < out_; ++x3)
        w_[(static_cast<std::size_t>(x1) * in2_ + x2) * out_ + x3] /= sum;
    }
}

MacChannel MacChannel::adder() {
  std::vector<double> w(2 * 2 * 3, 0.0);
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2) w[(static_cast<std::size_t>(x1) * 2 + x2) * 3 + (x1 + x2)] = 1.0;
  return MacChannel(2, 2, 3, std::move(w));
}

MacChannel MacChannel::xor_mac() {
  std::vector<double> w(2 * 2 * 2, 0.0);
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2) w[(static_cast<std::size_t>(x1) * 2 + x2) * 2 + (x1 ^ x2)] = 1.0;
  return MacChannel(2, 2, 2, std::move(w));
}

MacChannel MacChannel::useless() {
  std::vector<double> w(2 * 2 * 2, 0.5);
  return MacChannel(2, 2, 2, std::move(w));
}

MacChannel MacChannel::noisy_adder(double flip) {
  if (flip < 0.0 || flip >= 1.0) throw InvalidArgumentError("noisy_adder: flip out of range");
  std::vector<double> w(2 * 2 * 3, 0.0);
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2) {
      int good = x1 + x2;
      for (int x3 = 0; x3 < 3; ++x3)
        w[(static_cast<std::size_t>(x1) * 2 + x2) * 3 + x3] = (x3 == good) ? 1.0 - flip : flip / 2.0;
    }
  return MacChannel(2, 2, 3, std::move(w));
}

bool MacChannel::symmetric(double tol) const {
  if (in1_ != in2_) return false;
  for (int x1 = 0; x1 < in1_; ++x1)
    for (int x2 = 0; x2 < in2_; ++x2)
      for (int x3 = 0; x3 < out_; ++x3)
        if (std::fabs(w(x1, x2, x3) - w(x2, x1, x3)) > tol) return false;
  return true;
}

JointDist MacChannel::pushforward(const FiniteDist& p1, const FiniteDist& p2, int n) const {
  if (n < 1) throw InvalidArgumentError("pushforward: n must be >= 1");
  if (p1.alphabet_size() != in1_ || p2.alphabet_size() != in2_)
    throw InvalidArgumentError("pushforward: input alphabet mismatch");
  double log_entries = n * (std::log2(static_cast<double>(in1_)) + std::log2(static_cast<double>(in2_)) +
                            std::log2(static_cast<double>(out_)));
  if (log_entries > std::log2(static_cast<double>(memory_budget_entries())))
    throw BudgetError("pushforward: table exceeds memory budget");

  std::size_t n1 = 1, n2 = 1, n3 = 1;
  for (int t = 0; t < n; ++t) {
    n1 *= static_cast<std::size_t>(in1_);
    n2 *= static_cast<std::size_t>(in2_);
    n3 *= static_cast<std::size_t>(out_);
  }
  std::vector<double> table(n1 * n2 * n3, 0.0);
  std::vector<int> s1(n), s2(n), s3(n);
  for (std::size_t i1 = 0; i1 < n1; ++i1) {
    std::size_t rem = i1;
    double pr1 = 1.0;
    for (int t = n - 1; t >= 0; --t) {
      s1[t] = static_cast<int>(rem % in1_);
      rem /= in1_;
      pr1 *= p1.prob(s1[t]);
    }
    if (pr1 == 0.0) continue;
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      rem = i2;
      double pr2 = 1.0;
      for (int t = n - 1; t >= 0; --t) {
        s2[t] = static_cast<int>(rem % in2_);
        rem /= in2_;
        pr2 *= p2.prob(s2[t]);
      }
      if (pr2 == 0.0) continue;
      for (std::size_t i3 = 0; i3 < n3; ++i3) {
        rem = i3;
        double prw = 1.0;
        for (int t = n - 1; t >= 0; --t) {
          s3[t] = static_cast<int>(rem % out_);
          rem /= out_;
          prw *= w(s1[t], s2[t], s3[t]);
          if (prw == 0.0) break;
        }
        if (prw > 0.0) table[(i1 * n2 + i2) * n3 + i3] = pr1 * pr2 * prw;
      }
    }
  }
  return JointDist({static_cast<int>(n1), static_cast<int>(n2), static_cast<int>(n3)}, std::move(table));
}

int MacChannel::sample_output(int x1, int x2, Rng& rng) const {
  double u = rng.uniform01();
  double acc = 0.0;
  for (int x3 = 0; x3 + 1 < out_; ++x3) {
    acc += w(x1, x2, x3);
    if (u < acc) return x3;
  }
  return out_ - 1;
}

}  // namespace skmac
