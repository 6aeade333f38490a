#include "core/ctproto.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace skmac {

std::string restriction_name(Restriction r) {
  switch (r) {
    case Restriction::kSe:
      return "se";
    case Restriction::kNic:
      return "nic";
    default:
      return "general";
  }
}

Restriction restriction_from_name(const std::string& s) {
  if (s == "se" || s == "SE") return Restriction::kSe;
  if (s == "nic" || s == "NIC") return Restriction::kNic;
  if (s == "general") return Restriction::kGeneral;
  throw SchemaError("unknown restriction: " + s);
}

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

CtProtocol::CtProtocol(int n, std::array<int, 3> u_alph, int in1_alph, int in2_alph, int out_alph,
                       Restriction restriction, std::vector<CtSlotComm> comm,
                       std::vector<std::vector<int>> in1_maps, std::vector<std::vector<int>> in2_maps,
                       CtKeyMaps keys)
    : n_(n),
      u_(u_alph),
      in1_(in1_alph),
      in2_(in2_alph),
      out_(out_alph),
      restr_(restriction),
      comm_(std::move(comm)),
      in1_maps_(std::move(in1_maps)),
      in2_maps_(std::move(in2_maps)),
      keys_(std::move(keys)) {
  if (n_ < 1) throw InvalidArgumentError("CtProtocol: n must be >= 1");
  for (int a : u_)
    if (a < 1) throw InvalidArgumentError("CtProtocol: randomization alphabet must be >= 1");
  if (in1_ < 1 || in2_ < 1 || out_ < 1) throw InvalidArgumentError("CtProtocol: bad channel alphabets");
  if (static_cast<int>(comm_.size()) != n_ + 1)
    throw InvalidArgumentError("CtProtocol: need n+1 communication rounds");
  if (static_cast<int>(in1_maps_.size()) != n_ || static_cast<int>(in2_maps_.size()) != n_)
    throw InvalidArgumentError("CtProtocol: need n input maps per user");

  // restriction invariants are a construction-time contract
  for (int s = 1; s < n_; ++s) {
    if (restr_ == Restriction::kSe)
      for (const auto& msg : comm_[s].msgs)
        if (msg.alphabet != 1)
          throw InvalidArgumentError("CtProtocol: SE protocols must keep F_t constant for 2 <= t <= n");
    if (restr_ == Restriction::kNic)
      for (const auto& msg : comm_[s].msgs)
        if (msg.sender != 3)
          throw InvalidArgumentError("CtProtocol: NIC protocols allow only terminal 3 for 2 <= t <= n");
  }

  t_space_ = 1;
  t_space_at_input_.assign(n_, 1);
  for (int s = 0; s <= n_; ++s) {
    for (const auto& msg : comm_[s].msgs) {
      if (msg.sender < 1 || msg.sender > 3) throw InvalidArgumentError("CtProtocol: bad sender");
      if (msg.alphabet < 1) throw InvalidArgumentError("CtProtocol: bad message alphabet");
      std::size_t view = msg.sender == 1   ? static_cast<std::size_t>(u_[0])
                         : msg.sender == 2 ? static_cast<std::size_t>(u_[1])
                                           : static_cast<std::size_t>(u_[2]) * ipow(out_, s);
      if (msg.table.size() != view * t_space_)
        throw InvalidArgumentError("CtProtocol: message table size mismatch");
      for (int v : msg.table)
        if (v < 0 || v >= msg.alphabet) throw InvalidArgumentError("CtProtocol: message value out of range");
      if (t_space_ > memory_budget_entries() / static_cast<std::size_t>(msg.alphabet))
        throw BudgetError("CtProtocol: transcript space exceeds budget");
      t_space_ *= static_cast<std::size_t>(msg.alphabet);
    }
    if (s < n_) {
      t_space_at_input_[s] = t_space_;
      if (in1_maps_[s].size() != static_cast<std::size_t>(u_[0]) * t_space_)
        throw InvalidArgumentError("CtProtocol: input map 1 size mismatch at slot " + std::to_string(s + 1));
      if (in2_maps_[s].size() != static_cast<std::size_t>(u_[1]) * t_space_)
        throw InvalidArgumentError("CtProtocol: input map 2 size mismatch at slot " + std::to_string(s + 1));
      for (int v : in1_maps_[s])
        if (v < 0 || v >= in1_) throw InvalidArgumentError("CtProtocol: input symbol out of range");
      for (int v : in2_maps_[s])
        if (v < 0 || v >= in2_) throw InvalidArgumentError("CtProtocol: input symbol out of range");
    }
  }

  if (keys_.alphabet < 1) throw InvalidArgumentError("CtProtocol: bad key alphabet");
  if (keys_.target < 1 || keys_.target > 3) throw InvalidArgumentError("CtProtocol: bad key target");
  if (keys_.k1.size() != static_cast<std::size_t>(u_[0]) * t_space_ ||
      keys_.k2.size() != static_cast<std::size_t>(u_[1]) * t_space_ ||
      keys_.k3.size() != static_cast<std::size_t>(u_[2]) * ipow(out_, n_) * t_space_)
    throw InvalidArgumentError("CtProtocol: key map size mismatch");
  for (const auto* tab : {&keys_.k1, &keys_.k2, &keys_.k3})
    for (int v : *tab)
      if (v < 0 || v >= keys_.alphabet) throw InvalidArgumentError("CtProtocol: key value out of range");
}

namespace {

struct Exec {
  const CtProtocol& p;
  int u1, u2, u3;
  std::size_t tid = 0;
  std::size_t radix = 1;
  std::size_t y3id = 0;
  std::size_t y3radix = 1;

  // run communication round s given outputs so far
  void comm_round(int s) {
    for (const auto& msg : p.comm()[s].msgs) {
      std::size_t view;
      if (msg.sender == 1)
        view = static_cast<std::size_t>(u1);
      else if (msg.sender == 2)
        view = static_cast<std::size_t>(u2);
      else
        view = static_cast<std::size_t>(u3) * y3radix + y3id;
      int v = msg.table[view * radix + tid];
      tid += radix * static_cast<std::size_t>(v);
      radix *= static_cast<std::size_t>(msg.alphabet);
    }
  }

  std::pair<int, int> inputs(int s) const {
    int x1 = p.in1_maps()[s][static_cast<std::size_t>(u1) * radix + tid];
    int x2 = p.in2_maps()[s][static_cast<std::size_t>(u2) * radix + tid];
    return {x1, x2};
  }

  void observe(int y) {
    y3id += y3radix * static_cast<std::size_t>(y);
    y3radix *= static_cast<std::size_t>(p.out_alph());
  }
};

void fill_keys(const CtProtocol& p, int u1, int u2, int u3, std::size_t y3id, std::size_t tid, int& k1,
               int& k2, int& k3) {
  const auto& km = p.keys();
  std::size_t ts = p.transcript_space();
  k1 = km.k1[static_cast<std::size_t>(u1) * ts + tid];
  k2 = km.k2[static_cast<std::size_t>(u2) * ts + tid];
  std::size_t yspace = ipow(p.out_alph(), p.n());
  k3 = km.k3[(static_cast<std::size_t>(u3) * yspace + y3id) * ts + tid];
}

}  // namespace

SkTrace run_protocol(const CtProtocol& p, const MacChannel& ch, std::uint64_t seed) {
  if (ch.in1_size() != p.in1_alph() || ch.in2_size() != p.in2_alph() || ch.out_size() != p.out_alph())
    throw InvalidArgumentError("run_protocol: protocol does not match channel alphabets");
  Rng rng(seed, 0xc7);
  SkTrace tr;
  tr.u1 = static_cast<int>(rng.below(p.u_alph()[0]));
  tr.u2 = static_cast<int>(rng.below(p.u_alph()[1]));
  tr.u3 = static_cast<int>(rng.below(p.u_alph()[2]));
  Exec ex{p, tr.u1, tr.u2, tr.u3};
  for (int s = 0; s < p.n(); ++s) {
    ex.comm_round(s);
    auto [x1, x2] = ex.inputs(s);
    int y = ch.sample_output(x1, x2, rng);
    tr.x1.push_back(x1);
    tr.x2.push_back(x2);
    tr.x3.push_back(y);
    ex.observe(y);
  }
  ex.comm_round(p.n());
  tr.transcript = ex.tid;
  tr.key_alphabet = p.keys().alphabet;
  fill_keys(p, tr.u1, tr.u2, tr.u3, ex.y3id, ex.tid, tr.k1, tr.k2, tr.k3);
  return tr;
}

std::vector<CtPath> enumerate_protocol(const CtProtocol& p, const MacChannel& ch, std::size_t max_paths) {
  if (ch.in1_size() != p.in1_alph() || ch.in2_size() != p.in2_alph() || ch.out_size() != p.out_alph())
    throw InvalidArgumentError("enumerate_protocol: protocol does not match channel alphabets");
  std::vector<CtPath> out;
  double pu = 1.0 / (static_cast<double>(p.u_alph()[0]) * p.u_alph()[1] * p.u_alph()[2]);

  std::function<void(Exec&, int, CtPath&)> dfs = [&](Exec& ex, int s, CtPath& path) {
    if (s == p.n()) {
      Exec fin = ex;
      fin.comm_round(p.n());
      path.transcript = fin.tid;
      fill_keys(p, path.u1, path.u2, path.u3, fin.y3id, fin.tid, path.k1, path.k2, path.k3);
      out.push_back(path);
      if (out.size() > max_paths) throw BudgetError("enumerate_protocol: too many paths");
      return;
    }
    Exec next = ex;
    next.comm_round(s);
    auto [x1, x2] = next.inputs(s);
    path.x1.push_back(x1);
    path.x2.push_back(x2);
    for (int y = 0; y < p.out_alph(); ++y) {
      double w = ch.w(x1, x2, y);
      if (w <= 0.0) continue;
      Exec branch = next;
      branch.observe(y);
      double keep = path.prob;
      path.prob *= w;
      path.x3.push_back(y);
      dfs(branch, s + 1, path);
      path.x3.pop_back();
      path.prob = keep;
    }
    path.x1.pop_back();
    path.x2.pop_back();
  };

  for (int u1 = 0; u1 < p.u_alph()[0]; ++u1)
    for (int u2 = 0; u2 < p.u_alph()[1]; ++u2)
      for (int u3 = 0; u3 < p.u_alph()[2]; ++u3) {
        CtPath path;
        path.prob = pu;
        path.u1 = u1;
        path.u2 = u2;
        path.u3 = u3;
        Exec ex{p, u1, u2, u3};
        dfs(ex, 0, path);
      }
  return out;
}

namespace {

int target_key(const CtProtocol& p, int k1, int k2, int k3) {
  switch (p.keys().target) {
    case 1:
      return k1;
    case 2:
      return k2;
    default:
      return k3;
  }
}

// Dense-remap columns of value tuples and build a joint table. Columns with
// fixed_arity[c] > 0 keep their values as-is (declared alphabets, e.g. keys).
JointDist law_from_tuples(const std::vector<std::vector<long long>>& tuples, const std::vector<double>& probs,
                          const std::vector<int>& fixed_arity = {}) {
  if (tuples.empty()) throw InvalidArgumentError("law_from_tuples: empty");
  std::size_t cols = tuples[0].size();
  std::vector<std::map<long long, int>> remap(cols);
  std::vector<int> arity(cols, 0);
  for (std::size_t c = 0; c < cols; ++c)
    if (c < fixed_arity.size() && fixed_arity[c] > 0) arity[c] = fixed_arity[c];
  for (const auto& t : tuples)
    for (std::size_t c = 0; c < cols; ++c) {
      if (arity[c] > 0) {
        if (t[c] < 0 || t[c] >= arity[c]) throw InternalError("law_from_tuples: value outside fixed arity");
      } else {
        remap[c].emplace(t[c], 0);
      }
    }
  for (std::size_t c = 0; c < cols; ++c) {
    if (arity[c] > 0) continue;
    int next = 0;
    for (auto& [v, id] : remap[c]) id = next++;
    arity[c] = std::max(next, 1);
  }
  std::size_t total = 1;
  for (int a : arity) {
    if (total > memory_budget_entries() / static_cast<std::size_t>(a))
      throw BudgetError("law_from_tuples: exceeds memory budget");
    total *= static_cast<std::size_t>(a);
  }
  std::vector<double> table(total, 0.0);
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    std::size_t idx = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      std::size_t v = remap[c].empty() ? static_cast<std::size_t>(tuples[i][c])
                                       : static_cast<std::size_t>(remap[c].at(tuples[i][c]));
      idx = idx * static_cast<std::size_t>(arity[c]) + v;
    }
    table[idx] += probs[i];
  }
  return JointDist(std::move(arity), std::move(table));
}

long long seq_id(const std::vector<int>& seq, int alphabet) {
  long long id = 0;
  for (std::size_t i = seq.size(); i-- > 0;) id = id * alphabet + seq[i];
  return id;
}

}  // namespace

KeyMetrics key_metrics_exact(const CtProtocol& p, const std::vector<CtPath>& paths) {
  KeyMetrics m;
  m.exact = true;
  std::map<std::pair<int, long long>, double> kf;
  std::map<long long, double> f;
  for (const auto& path : paths) {
    int k = target_key(p, path.k1, path.k2, path.k3);
    if (path.k1 == k && path.k2 == k && path.k3 == k) m.agreement += path.prob;
    kf[{k, static_cast<long long>(path.transcript)}] += path.prob;
    f[static_cast<long long>(path.transcript)] += path.prob;
  }
  double h_kf = 0.0, h_f = 0.0;
  for (auto& [k, v] : kf) h_kf -= xlog2x(v);
  for (auto& [k, v] : f) h_f -= xlog2x(v);
  m.s_in = std::log2(static_cast<double>(p.keys().alphabet)) - (h_kf - h_f);
  if (m.s_in < 0.0) m.s_in = 0.0;
  m.weak_rate = m.s_in / p.n();
  m.samples = paths.size();
  return m;
}

KeyMetrics key_metrics_sampled(const CtProtocol& p, const std::vector<SkTrace>& traces) {
  KeyMetrics m;
  m.exact = false;
  m.samples = traces.size();
  if (traces.empty()) return m;
  std::map<std::pair<int, long long>, double> kf;
  std::map<long long, double> f;
  double w = 1.0 / static_cast<double>(traces.size());
  for (const auto& tr : traces) {
    int k = target_key(p, tr.k1, tr.k2, tr.k3);
    if (tr.k1 == k && tr.k2 == k && tr.k3 == k) m.agreement += w;
    kf[{k, static_cast<long long>(tr.transcript)}] += w;
    f[static_cast<long long>(tr.transcript)] += w;
  }
  double h_kf = 0.0, h_f = 0.0;
  for (auto& [k, v] : kf) h_kf -= xlog2x(v);
  for (auto& [k, v] : f) h_f -= xlog2x(v);
  m.s_in = std::log2(static_cast<double>(p.keys().alphabet)) - (h_kf - h_f);
  if (m.s_in < 0.0) m.s_in = 0.0;
  m.weak_rate = m.s_in / p.n();
  return m;
}

JointDist view_law(const CtProtocol& p, const std::vector<CtPath>& paths) {
  std::vector<std::vector<long long>> tuples;
  std::vector<double> probs;
  for (const auto& path : paths) {
    long long y1 = seq_id(path.x1, p.in1_alph()) * p.u_alph()[0] + path.u1;
    long long y2 = seq_id(path.x2, p.in2_alph()) * p.u_alph()[1] + path.u2;
    long long y3 = seq_id(path.x3, p.out_alph()) * p.u_alph()[2] + path.u3;
    long long k = target_key(p, path.k1, path.k2, path.k3);
    tuples.push_back({y1, y2, y3, k, static_cast<long long>(path.transcript)});
    probs.push_back(path.prob);
  }
  // the key keeps its declared alphabet so log|K| survives in the law
  return law_from_tuples(tuples, probs, {0, 0, 0, p.keys().alphabet, 0});
}

JointDist nic_trace_law(const CtProtocol& p, const std::vector<CtPath>& paths) {
  std::vector<std::vector<long long>> tuples;
  std::vector<double> probs;
  for (const auto& path : paths) {
    tuples.push_back({path.u1, path.u2, path.u3, seq_id(path.x3, p.out_alph())});
    probs.push_back(path.prob);
  }
  return law_from_tuples(tuples, probs);
}

JointDist se_trace_law(const CtProtocol& p, const std::vector<CtPath>& paths) {
  std::vector<std::vector<long long>> tuples;
  std::vector<double> probs;
  for (const auto& path : paths) {
    tuples.push_back({seq_id(path.x1, p.in1_alph()), path.u1, seq_id(path.x2, p.in2_alph()), path.u2,
                      seq_id(path.x3, p.out_alph()), path.u3});
    probs.push_back(path.prob);
  }
  return law_from_tuples(tuples, probs);
}

JointDist f1_law(const CtProtocol& p, const std::vector<CtPath>& paths, std::size_t* f1_space_out) {
  std::size_t f1_space = 1;
  for (const auto& msg : p.comm()[0].msgs) f1_space *= static_cast<std::size_t>(msg.alphabet);
  if (f1_space_out != nullptr) *f1_space_out = f1_space;
  std::vector<std::vector<long long>> tuples;
  std::vector<double> probs;
  for (const auto& path : paths) {
    long long f1 = static_cast<long long>(path.transcript % f1_space);
    long long frest = static_cast<long long>(path.transcript / f1_space);
    long long k = target_key(p, path.k1, path.k2, path.k3);
    tuples.push_back({path.u1, path.u2, path.u3, f1, frest, path.k1, path.k2, path.k3, k});
    probs.push_back(path.prob);
  }
  int ka = p.keys().alphabet;
  return law_from_tuples(tuples, probs, {0, 0, 0, 0, 0, ka, ka, ka, ka});
}

CtProtocol random_ct_protocol(Restriction r, int n, const MacChannel& ch, Rng& rng, bool binary_u) {
  std::array<int, 3> u{2, 2, 2};
  u[0] = (binary_u || rng.bit()) ? 2 : 4;
  u[1] = (binary_u || rng.bit()) ? 2 : 4;
  u[2] = 2;

  std::vector<CtSlotComm> comm(n + 1);
  std::size_t t_space = 1;
  int total_msgs = 0;
  auto add_msg = [&](int s, int sender) {
    if (total_msgs >= 6) return;
    CtMsg msg;
    msg.sender = sender;
    msg.alphabet = 2;
    std::size_t view = sender == 1   ? static_cast<std::size_t>(u[0])
                       : sender == 2 ? static_cast<std::size_t>(u[1])
                                     : static_cast<std::size_t>(u[2]) * ipow(ch.out_size(), s);
    msg.table.resize(view * t_space);
    for (auto& v : msg.table) v = static_cast<int>(rng.below(2));
    t_space *= 2;
    ++total_msgs;
    comm[s].msgs.push_back(std::move(msg));
  };

  // first round: interactive from anyone
  int first_msgs = static_cast<int>(rng.below(3));
  for (int i = 0; i < first_msgs; ++i) add_msg(0, 1 + static_cast<int>(rng.below(3)));
  for (int s = 1; s < n; ++s) {
    if (r == Restriction::kSe) continue;
    int k = static_cast<int>(rng.below(2));
    for (int i = 0; i < k; ++i) add_msg(s, r == Restriction::kNic ? 3 : 1 + static_cast<int>(rng.below(3)));
  }
  int last_msgs = static_cast<int>(rng.below(3));
  for (int i = 0; i < last_msgs; ++i) add_msg(n, 1 + static_cast<int>(rng.below(3)));

  // input maps, sized against the transcript space reached before each slot's
  // transmission; rebuild by replaying the same growth
  std::vector<std::vector<int>> in1(n), in2(n);
  std::size_t running = 1;
  for (int s = 0; s < n; ++s) {
    for (const auto& msg : comm[s].msgs) running *= static_cast<std::size_t>(msg.alphabet);
    in1[s].resize(static_cast<std::size_t>(u[0]) * running);
    in2[s].resize(static_cast<std::size_t>(u[1]) * running);
    for (auto& v : in1[s]) v = static_cast<int>(rng.below(ch.in1_size()));
    for (auto& v : in2[s]) v = static_cast<int>(rng.below(ch.in2_size()));
  }
  for (const auto& msg : comm[n].msgs) running *= static_cast<std::size_t>(msg.alphabet);

  CtKeyMaps keys;
  keys.alphabet = rng.bit() ? 2 : 4;
  keys.target = 1;
  keys.k1.resize(static_cast<std::size_t>(u[0]) * running);
  keys.k2.resize(static_cast<std::size_t>(u[1]) * running);
  keys.k3.resize(static_cast<std::size_t>(u[2]) * ipow(ch.out_size(), n) * running);
  if (rng.below(3) == 0) {
    // keys read the transcript only: perfect agreement, fully public
    std::vector<int> of_t(running);
    for (auto& v : of_t) v = static_cast<int>(rng.below(keys.alphabet));
    for (std::size_t i = 0; i < keys.k1.size(); ++i) keys.k1[i] = of_t[i % running];
    for (std::size_t i = 0; i < keys.k2.size(); ++i) keys.k2[i] = of_t[i % running];
    for (std::size_t i = 0; i < keys.k3.size(); ++i) keys.k3[i] = of_t[i % running];
  } else {
    for (auto& v : keys.k1) v = static_cast<int>(rng.below(keys.alphabet));
    for (auto& v : keys.k2) v = static_cast<int>(rng.below(keys.alphabet));
    for (auto& v : keys.k3) v = static_cast<int>(rng.below(keys.alphabet));
  }

  return CtProtocol(n, u, ch.in1_size(), ch.in2_size(), ch.out_size(), r, std::move(comm), std::move(in1),
                    std::move(in2), std::move(keys));
}

}  // namespace skmac
