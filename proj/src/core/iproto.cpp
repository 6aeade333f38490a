#include "core/iproto.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace skmac {

namespace {

constexpr std::size_t kObsSpaceLimit = static_cast<std::size_t>(1) << 20;

std::size_t obs_space(const std::vector<int>& alph) {
  std::size_t s = 1;
  for (int a : alph) {
    if (a <= 0) throw InvalidArgumentError("observation alphabet must be positive");
    s *= static_cast<std::size_t>(a);
    if (s > kObsSpaceLimit) throw BudgetError("observation space exceeds 2^20 enumeration bound");
  }
  return s;
}

}  // namespace

InteractiveProtocol::InteractiveProtocol(int m, std::vector<int> obs_alphabets, std::vector<IMsg> msgs)
    : m_(m), obs_alph_(std::move(obs_alphabets)), msgs_(std::move(msgs)) {
  if (m_ < 2) throw InvalidArgumentError("InteractiveProtocol: need at least 2 terminals");
  if (static_cast<int>(obs_alph_.size()) != m_)
    throw InvalidArgumentError("InteractiveProtocol: alphabet list size mismatch");
  obs_space(obs_alph_);
  t_space_ = 1;
  for (const auto& msg : msgs_) {
    if (msg.sender < 0 || msg.sender >= m_) throw InvalidArgumentError("InteractiveProtocol: bad sender");
    if (msg.alphabet < 1) throw InvalidArgumentError("InteractiveProtocol: bad message alphabet");
    std::size_t need = static_cast<std::size_t>(obs_alph_[msg.sender]) * t_space_;
    if (msg.table.size() != need) throw InvalidArgumentError("InteractiveProtocol: message table size mismatch");
    for (int v : msg.table)
      if (v < 0 || v >= msg.alphabet) throw InvalidArgumentError("InteractiveProtocol: table value out of range");
    if (t_space_ > memory_budget_entries() / static_cast<std::size_t>(msg.alphabet))
      throw BudgetError("InteractiveProtocol: transcript space exceeds budget");
    t_space_ *= static_cast<std::size_t>(msg.alphabet);
  }
}

std::size_t InteractiveProtocol::run(const std::vector<int>& obs) const {
  std::size_t tid = 0;
  std::size_t radix = 1;
  for (const auto& msg : msgs_) {
    std::size_t prior_space = radix;
    int v = msg.table[static_cast<std::size_t>(obs[msg.sender]) * prior_space + tid];
    tid += radix * static_cast<std::size_t>(v);
    radix *= static_cast<std::size_t>(msg.alphabet);
  }
  return tid;
}

namespace {

template <typename TidFn>
TranscriptLaw transcript_law_impl(int m, const std::vector<int>& obs_alph, const JointDist& src, TidFn tid_fn) {
  if (src.num_vars() != m) throw InvalidArgumentError("transcript_law: law variable count mismatch");
  for (int i = 0; i < m; ++i)
    if (src.arity(i) != obs_alph[i])
      throw InvalidArgumentError("transcript_law: observation alphabet mismatch");

  std::size_t total = obs_space(obs_alph);
  std::map<std::size_t, int> dense;
  std::vector<std::size_t> tids(total);
  std::vector<int> obs(m);
  for (std::size_t idx = 0; idx < total; ++idx) {
    src.symbols_of(idx, obs);
    std::size_t tid = tid_fn(obs);
    tids[idx] = tid;
    dense.emplace(tid, 0);
  }
  int next = 0;
  std::vector<std::size_t> dense_to_tid;
  for (auto& [tid, id] : dense) {
    id = next++;
    dense_to_tid.push_back(tid);
  }

  std::vector<int> arity = obs_alph;
  arity.push_back(next);
  std::vector<double> table(total * static_cast<std::size_t>(next), 0.0);
  for (std::size_t idx = 0; idx < total; ++idx)
    table[idx * static_cast<std::size_t>(next) + static_cast<std::size_t>(dense[tids[idx]])] = src.table()[idx];
  return TranscriptLaw{JointDist(std::move(arity), std::move(table)), std::move(dense_to_tid)};
}

}  // namespace

TranscriptLaw transcript_law(const InteractiveProtocol& proto, const JointDist& src) {
  return transcript_law_impl(proto.m(), proto.obs_alphabets(), src,
                             [&](const std::vector<int>& obs) { return proto.run(obs); });
}

TranscriptLaw transcript_law(const DirectTranscript& tr, const JointDist& src) {
  std::vector<int> obs_alph = src.arities();
  std::size_t total = obs_space(obs_alph);
  if (tr.table.size() != total) throw InvalidArgumentError("DirectTranscript: table size mismatch");
  return transcript_law_impl(src.num_vars(), obs_alph, src, [&](const std::vector<int>& obs) {
    int v = tr.table[src.index_of(obs)];
    if (v < 0 || v >= tr.alphabet) throw InvalidArgumentError("DirectTranscript: value out of range");
    return static_cast<std::size_t>(v);
  });
}

namespace {

InteractiveCheck check_inequality_on_law(const TranscriptLaw& tl, int m, const FractionalPartition& lam) {
  if (lam.m != m) throw InvalidArgumentError("check_interactive_inequality: partition size mismatch");
  if (!lam.valid()) throw InvalidArgumentError("check_interactive_inequality: invalid fractional partition");
  InteractiveCheck out;
  out.lhs = tl.law.entropy({m});
  std::uint32_t full = (1u << m) - 1;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    double w = lam.weight(mask);
    if (w == 0.0) continue;
    std::vector<int> bc;
    for (int i = 0; i < m; ++i)
      if (!(mask & (1u << i))) bc.push_back(i);
    out.rhs += w * tl.law.conditional_entropy({m}, bc);
  }
  out.holds = out.lhs >= out.rhs - 1e-9;
  return out;
}

double factorization_gap_on_law(const TranscriptLaw& tl, int m) {
  const JointDist& law = tl.law;
  int f_arity = law.arity(m);
  std::size_t obs_total = law.table_size() / static_cast<std::size_t>(f_arity);

  // P(f), P(y_i, f) marginals
  std::vector<double> pf(f_arity, 0.0);
  std::vector<std::vector<double>> pif(m);
  for (int i = 0; i < m; ++i) pif[i].assign(static_cast<std::size_t>(law.arity(i)) * f_arity, 0.0);

  std::vector<int> sym(m + 1);
  for (std::size_t idx = 0; idx < law.table_size(); ++idx) {
    double p = law.table()[idx];
    if (p == 0.0) continue;
    law.symbols_of(idx, sym);
    int f = sym[m];
    pf[f] += p;
    for (int i = 0; i < m; ++i) pif[i][static_cast<std::size_t>(sym[i]) * f_arity + f] += p;
  }

  double max_gap = 0.0;
  for (int f = 0; f < f_arity; ++f) {
    if (pf[f] <= 0.0) continue;
    double d = 0.0;
    for (std::size_t obs_idx = 0; obs_idx < obs_total; ++obs_idx) {
      std::size_t idx = obs_idx * static_cast<std::size_t>(f_arity) + static_cast<std::size_t>(f);
      double pj = law.table()[idx] / pf[f];
      if (pj == 0.0) continue;
      law.symbols_of(idx, sym);
      double q = 1.0;
      for (int i = 0; i < m; ++i) q *= pif[i][static_cast<std::size_t>(sym[i]) * f_arity + f] / pf[f];
      if (q <= 0.0) return std::numeric_limits<double>::infinity();
      d += pj * std::log2(pj / q);
    }
    max_gap = std::max(max_gap, d);
  }
  return max_gap;
}

void require_product_law(const JointDist& src) {
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < src.num_vars(); ++i) groups.push_back({i});
  JointDist prod = src.product_of_marginals(groups);
  for (std::size_t idx = 0; idx < src.table_size(); ++idx)
    if (std::fabs(src.table()[idx] - prod.table()[idx]) > 1e-9)
      throw InvalidArgumentError("check_factorization: input law is not a product law");
}

}  // namespace

InteractiveCheck check_interactive_inequality(const InteractiveProtocol& proto, const JointDist& src,
                                              const FractionalPartition& lam) {
  return check_inequality_on_law(transcript_law(proto, src), proto.m(), lam);
}

InteractiveCheck check_interactive_inequality(const DirectTranscript& tr, const JointDist& src,
                                              const FractionalPartition& lam) {
  return check_inequality_on_law(transcript_law(tr, src), src.num_vars(), lam);
}

double check_factorization(const InteractiveProtocol& proto, const JointDist& src) {
  require_product_law(src);
  return factorization_gap_on_law(transcript_law(proto, src), proto.m());
}

double check_factorization(const DirectTranscript& tr, const JointDist& src) {
  require_product_law(src);
  return factorization_gap_on_law(transcript_law(tr, src), src.num_vars());
}

InteractiveProtocol random_interactive_protocol(int m, int max_obs_alphabet, int max_rounds, Rng& rng,
                                                const std::vector<int>& obs_alphabets) {
  std::vector<int> obs = obs_alphabets;
  if (obs.empty()) {
    obs.resize(m);
    for (int i = 0; i < m; ++i) obs[i] = 2 + static_cast<int>(rng.below(max_obs_alphabet - 1));
  }
  int rounds = 1 + static_cast<int>(rng.below(max_rounds));
  std::vector<IMsg> msgs;
  std::size_t t_space = 1;
  for (int r = 0; r < rounds; ++r) {
    for (int sender = 0; sender < m; ++sender) {
      IMsg msg;
      msg.sender = sender;
      msg.alphabet = 2;
      std::size_t need = static_cast<std::size_t>(obs[sender]) * t_space;
      msg.table.resize(need);
      for (auto& v : msg.table) v = static_cast<int>(rng.below(msg.alphabet));
      t_space *= static_cast<std::size_t>(msg.alphabet);
      msgs.push_back(std::move(msg));
    }
  }
  return InteractiveProtocol(m, obs, std::move(msgs));
}

JointDist random_joint_dist(const std::vector<int>& arity, Rng& rng) {
  std::size_t total = 1;
  for (int a : arity) total *= static_cast<std::size_t>(a);
  std::vector<double> t(total);
  double sum = 0.0;
  for (auto& v : t) {
    v = -std::log(1.0 - rng.uniform01());
    sum += v;
  }
  for (auto& v : t) v /= sum;
  return JointDist(arity, std::move(t));
}

JointDist random_product_dist(const std::vector<int>& arity, Rng& rng) {
  std::vector<std::vector<double>> margs;
  for (int a : arity) {
    std::vector<double> p(a);
    double sum = 0.0;
    for (auto& v : p) {
      v = 0.05 + rng.uniform01();
      sum += v;
    }
    for (auto& v : p) v /= sum;
    margs.push_back(std::move(p));
  }
  std::size_t total = 1;
  for (int a : arity) total *= static_cast<std::size_t>(a);
  std::vector<double> t(total, 1.0);
  std::vector<int> sym(arity.size());
  JointDist shape = JointDist::uniform(arity);
  for (std::size_t idx = 0; idx < total; ++idx) {
    shape.symbols_of(idx, sym);
    double p = 1.0;
    for (std::size_t i = 0; i < arity.size(); ++i) p *= margs[i][sym[i]];
    t[idx] = p;
  }
  return JointDist(arity, std::move(t));
}

}  // namespace skmac
