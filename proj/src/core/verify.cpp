#include "core/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "core/bound.hpp"
#include "core/ctproto.hpp"
#include "core/fbcode.hpp"
#include "core/hashext.hpp"
#include "core/iproto.hpp"
#include "core/pipeline.hpp"
#include "core/rates.hpp"

namespace skmac {

namespace {

BatteryResult info_kernel_battery(int cases, std::uint64_t seed) {
  BatteryResult r{"info-kernel-properties", true, static_cast<std::uint64_t>(cases), ""};
  for (int c = 0; c < cases; ++c) {
    Rng rng(derive_seed(seed, c), 0x11);
    std::vector<int> arity{2 + static_cast<int>(rng.below(3)), 2 + static_cast<int>(rng.below(3)),
                           2 + static_cast<int>(rng.below(2))};
    JointDist j = random_joint_dist(arity, rng);
    // chain rule
    double lhs = j.entropy({0, 1});
    double rhs = j.entropy({1}) + j.conditional_entropy({0}, {1});
    if (std::fabs(lhs - rhs) > 1e-9) {
      r.pass = false;
      r.detail = "chain rule failed at case " + std::to_string(c);
      break;
    }
    // I(a;b) = D(joint || product)
    double mi = j.mutual_information({0}, {1});
    JointDist m01 = j.marginal({0, 1});
    double kl = JointDist::kl_divergence(m01, m01.product_of_marginals({{0}, {1}}));
    if (std::fabs(mi - kl) > 1e-9) {
      r.pass = false;
      r.detail = "MI/KL identity failed at case " + std::to_string(c);
      break;
    }
    // security index KL form: log|K| - H(K|F) = D(P_KF || unif x P_F)
    double s = j.security_index({0}, {1, 2});
    JointDist kf = j.marginal({0, 1, 2});
    std::vector<double> unif_f(kf.table_size());
    JointDist fonly = j.marginal({1, 2});
    std::vector<int> sym(3);
    for (std::size_t idx = 0; idx < kf.table_size(); ++idx) {
      kf.symbols_of(idx, sym);
      unif_f[idx] = fonly.table()[fonly.index_of({sym[1], sym[2]})] / arity[0];
    }
    double skl = JointDist::kl_divergence(kf, JointDist(kf.arities(), std::move(unif_f)));
    if (std::fabs(s - skl) > 1e-9) {
      r.pass = false;
      r.detail = "security-index KL identity failed at case " + std::to_string(c);
      break;
    }
    // data processing: I(a; f(b)) <= I(a; b)
    int b_ar = arity[1];
    std::vector<int> f_map(b_ar);
    for (auto& v : f_map) v = static_cast<int>(rng.below(2));
    std::vector<int> new_arity = {arity[0], arity[1], 2};
    std::vector<double> tbl(static_cast<std::size_t>(arity[0]) * b_ar * 2, 0.0);
    JointDist mab = j.marginal({0, 1});
    for (int a = 0; a < arity[0]; ++a)
      for (int b = 0; b < b_ar; ++b)
        tbl[(static_cast<std::size_t>(a) * b_ar + b) * 2 + f_map[b]] += mab.table()[mab.index_of({a, b})];
    JointDist jf(new_arity, std::move(tbl));
    if (jf.mutual_information({0}, {2}) > j.mutual_information({0}, {1}) + 1e-9) {
      r.pass = false;
      r.detail = "data processing failed at case " + std::to_string(c);
      break;
    }
  }
  return r;
}

BatteryResult interactive_inequality_battery(int protocols, int partitions, std::uint64_t seed) {
  BatteryResult r{"interactive-inequality", true,
                  static_cast<std::uint64_t>(protocols) * partitions, ""};
  for (int c = 0; c < protocols && r.pass; ++c) {
    Rng rng(derive_seed(seed, 1000 + c), 0x21);
    std::vector<int> obs{2 + static_cast<int>(rng.below(3)), 2 + static_cast<int>(rng.below(3)),
                         2 + static_cast<int>(rng.below(3))};
    InteractiveProtocol proto = random_interactive_protocol(3, 4, 3, rng, obs);
    JointDist src = random_joint_dist(obs, rng);
    for (int p = 0; p < partitions; ++p) {
      FractionalPartition lam = random_fractional_partition(3, rng);
      InteractiveCheck chk = check_interactive_inequality(proto, src, lam);
      if (!chk.holds) {
        r.pass = false;
        r.detail = "violated at protocol " + std::to_string(c) + " partition " + std::to_string(p) +
                   " lhs=" + std::to_string(chk.lhs) + " rhs=" + std::to_string(chk.rhs);
        break;
      }
    }
  }
  if (r.pass) {
    // the xor transcript is not interactive and must break the inequality
    JointDist unif = JointDist::uniform({2, 2});
    DirectTranscript tr;
    tr.alphabet = 2;
    tr.table = {0, 1, 1, 0};
    Partition p2{2, {1u, 2u}};
    InteractiveCheck chk = check_interactive_inequality(tr, unif, partition_to_fractional(p2));
    if (!(std::fabs(chk.lhs - 1.0) < 1e-12 && std::fabs(chk.rhs - 2.0) < 1e-12 && !chk.holds)) {
      r.pass = false;
      r.detail = "xor negative control gave lhs=" + std::to_string(chk.lhs) +
                 " rhs=" + std::to_string(chk.rhs);
    }
  }
  return r;
}

BatteryResult factorization_battery(int protocols, std::uint64_t seed) {
  BatteryResult r{"factorization-preservation", true, static_cast<std::uint64_t>(protocols), ""};
  for (int c = 0; c < protocols; ++c) {
    Rng rng(derive_seed(seed, 2000 + c), 0x22);
    std::vector<int> obs{2 + static_cast<int>(rng.below(3)), 2 + static_cast<int>(rng.below(3)),
                         2 + static_cast<int>(rng.below(3))};
    InteractiveProtocol proto = random_interactive_protocol(3, 4, 3, rng, obs);
    JointDist src = random_product_dist(obs, rng);
    double gap = check_factorization(proto, src);
    if (gap > 1e-9) {
      r.pass = false;
      r.detail = "gap " + std::to_string(gap) + " at protocol " + std::to_string(c);
      break;
    }
  }
  if (r.pass) {
    JointDist unif = JointDist::uniform({2, 2});
    DirectTranscript tr;
    tr.alphabet = 2;
    tr.table = {0, 1, 1, 0};
    double gap = check_factorization(tr, unif);
    if (std::fabs(gap - 1.0) > 1e-9) {
      r.pass = false;
      r.detail = "genie xor control gap " + std::to_string(gap) + " (expected 1.0)";
    }
  }
  return r;
}

BatteryResult converse_dominance_battery(int protocols, std::uint64_t seed) {
  BatteryResult r{"one-shot-converse-dominance", true, static_cast<std::uint64_t>(protocols), ""};
  MacChannel channels[3] = {MacChannel::adder(), MacChannel::xor_mac(), MacChannel::noisy_adder(0.05)};
  for (int c = 0; c < protocols; ++c) {
    Rng rng(derive_seed(seed, 3000 + c), 0x23);
    const MacChannel& ch = channels[rng.below(3)];
    int n = 1 + static_cast<int>(rng.below(2));
    CtProtocol proto = random_ct_protocol(Restriction::kGeneral, n, ch, rng);
    auto paths = enumerate_protocol(proto, ch);
    KeyMetrics km = key_metrics_exact(proto, paths);
    JointDist law = view_law(proto, paths);
    double eps = std::min(0.999, std::max(0.0, 1.0 - km.agreement));
    BestBound bb = best_bound_lp(law, {{0}, {1}, {2}});
    ConverseBoundResult b = one_shot_bound(law, {{0}, {1}, {2}}, {3}, {4}, bb.lam, eps);
    double log_k = std::log2(static_cast<double>(proto.keys().alphabet));
    if (log_k > b.bound_bits + 1e-6) {
      r.pass = false;
      r.detail = "bound violated at protocol " + std::to_string(c) + ": log|K|=" + std::to_string(log_k) +
                 " bound=" + std::to_string(b.bound_bits);
      break;
    }
    // LP penalty dominates every partition-induced penalty
    for (const auto& pi : enumerate_partitions(3)) {
      ConverseBoundResult bp = one_shot_bound(law, {{0}, {1}, {2}}, {3}, {4}, pi, eps);
      if (bp.penalty > bb.penalty + 1e-8) {
        r.pass = false;
        r.detail = "LP penalty not dominant at protocol " + std::to_string(c);
        break;
      }
    }
    if (!r.pass) break;
  }
  return r;
}

BatteryResult se_nic_battery(int per_kind, std::uint64_t seed) {
  BatteryResult r{"se-nic-rate-operationalization", true, static_cast<std::uint64_t>(2 * per_kind), ""};
  MacChannel ch = MacChannel::adder();
  for (int kind = 0; kind < 2 && r.pass; ++kind) {
    Restriction restr = kind == 0 ? Restriction::kSe : Restriction::kNic;
    for (int c = 0; c < per_kind; ++c) {
      Rng rng(derive_seed(seed, 4000 + kind * 1000 + c), 0x24);
      int n = 1 + static_cast<int>(rng.below(3));
      CtProtocol proto = random_ct_protocol(restr, n, ch, rng);
      auto paths = enumerate_protocol(proto, ch);
      KeyMetrics km = key_metrics_exact(proto, paths);
      double log_k = std::log2(static_cast<double>(proto.keys().alphabet));
      double eps = std::min(0.999, std::max(0.0, 1.0 - km.agreement));
      double nu = 5.0 * (eps * log_k + binary_entropy(eps));
      double rate = restr == Restriction::kSe ? n_letter_rate_se(se_trace_law(proto, paths), n)
                                              : n_letter_rate_nic(nic_trace_law(proto, paths), n);
      double lhs = (log_k - km.s_in - nu) / n;
      if (lhs > rate + 1e-6) {
        r.pass = false;
        r.detail = std::string(restr == Restriction::kSe ? "SE" : "NIC") + " bound violated at case " +
                   std::to_string(c) + ": lhs=" + std::to_string(lhs) + " rate=" + std::to_string(rate);
        break;
      }
    }
  }
  return r;
}

BatteryResult pentagon_battery(int cases, std::uint64_t seed) {
  BatteryResult r{"pentagon-and-rstar", true, static_cast<std::uint64_t>(cases), ""};
  MacChannel channels[3] = {MacChannel::adder(), MacChannel::xor_mac(), MacChannel::noisy_adder(0.05)};
  for (int c = 0; c < cases; ++c) {
    Rng rng(derive_seed(seed, 5000 + c), 0x25);
    const MacChannel& ch = channels[rng.below(3)];
    double p = rng.uniform01(), q = rng.uniform01();
    PentagonRates pr = pentagon(ch, FiniteDist({p, 1 - p}), FiniteDist({q, 1 - q}));
    if (!(pr.i1 >= -1e-12 && pr.i2 >= -1e-12 && std::max(pr.i1, pr.i2) <= pr.isum + 1e-9 &&
          pr.isum <= pr.i1 + pr.i2 + 1e-9)) {
      r.pass = false;
      r.detail = "pentagon invariant failed at case " + std::to_string(c);
      return r;
    }
  }
  RstarResult adder = compute_rstar(MacChannel::adder());
  RstarResult xr = compute_rstar(MacChannel::xor_mac());
  RstarResult useless = compute_rstar(MacChannel::useless());
  if (std::fabs(adder.rate - 0.75) > 1e-3 || std::fabs(xr.rate - 0.5) > 1e-3 || useless.rate != 0.0) {
    r.pass = false;
    std::ostringstream os;
    os << "rstar values adder=" << adder.rate << " xor=" << xr.rate << " useless=" << useless.rate;
    r.detail = os.str();
  }
  return r;
}

BatteryResult fbcode_battery(bool full, std::uint64_t seed) {
  BatteryResult r{"feedback-code", true, 0, ""};
  double r1e5 = adder_rate_analytic(100000, 2.0);
  double target = 2.0 / (2.0 + 1.0 / std::log2(3.0));
  if (std::fabs(r1e5 - target) > 0.003) {
    r.pass = false;
    r.detail = "analytic rate at k=1e5: " + std::to_string(r1e5);
    return r;
  }
  long long k0 = adder_k0_above_rstar(2.0, 1 << 17);
  if (k0 < 0) {
    r.pass = false;
    r.detail = "no k0 with rate above 0.75";
    return r;
  }
  int k = full ? 1000 : 200;
  std::uint64_t trials = full ? 10000 : 2000;
  SimulationResult sim = simulate_code(MacChannel::adder(), AdderFeedbackCode(k, 4.0), trials,
                                       derive_seed(seed, 61), 1);
  r.cases = trials;
  if (sim.error_prob > 0.01) {
    r.pass = false;
    r.detail = "adder code error prob " + std::to_string(sim.error_prob);
    return r;
  }
  // hash 2-universality by sampling
  Rng rng(derive_seed(seed, 62), 0x26);
  int len = 8, n_in = 64;
  std::uint64_t collisions = 0, samples = full ? 100000 : 20000;
  for (std::uint64_t i = 0; i < samples; ++i) {
    HashExtractor ext(n_in, len, rng.next_u64());
    BitVec x = BitVec::random(n_in, rng);
    BitVec y = BitVec::random(n_in, rng);
    if (x == y) continue;
    if (ext.apply(x) == ext.apply(y)) ++collisions;
  }
  double rate = static_cast<double>(collisions) / samples;
  if (rate > (1.0 / 256.0) * 1.1) {
    r.pass = false;
    r.detail = "hash collision rate " + std::to_string(rate);
  }
  return r;
}

BatteryResult tiny_pipeline_battery(std::uint64_t seed) {
  BatteryResult r{"tiny-exact-security", true, 2, ""};
  PipelineParams pr;
  pr.blocks = 6;
  pr.dpa = 0.25;
  pr.dsw = 0.1;
  pr.seed = seed;
  pr.agreement_trials = 4;
  pr.sin_sketch_trials = 0;
  PipelineReport rep = feedback_sk_scheme(MacChannel::adder(), std::make_shared<AdderFeedbackCode>(2, 1.0), pr);
  if (rep.s_in_mode != "exact" || rep.s_in_total > 0.1) {
    r.pass = false;
    r.detail = "tiny pipeline s_in " + std::to_string(rep.s_in_total) + " (" + rep.s_in_mode + ")";
    return r;
  }
  SeSchemeReport se = source_emulation_sk(MacChannel::adder(), 8, {0.75, 0.75}, derive_seed(seed, 63), 0);
  if (!se.s_in_exact || se.s_in != 0.0 || !se.agreement_exact || se.agreement != 1.0) {
    r.pass = false;
    r.detail = "SE adder scheme s_in=" + std::to_string(se.s_in) + " agreement=" + std::to_string(se.agreement);
  }
  return r;
}

BatteryResult symmetry_battery(std::uint64_t seed) {
  (void)seed;
  BatteryResult r{"symmetrized-entropy-identity", true, 2, ""};
  auto sym_adder = symmetrize_code(MacChannel::adder(), std::make_shared<AdderFeedbackCode>(2, 1.0));
  double gap = symmetry_entropy_gap(MacChannel::adder(), *sym_adder);
  auto sym_tdma = symmetrize_code(MacChannel::xor_mac(), std::make_shared<TdmaIdentityCode>(2, 2));
  double gap2 = symmetry_entropy_gap(MacChannel::xor_mac(), *sym_tdma);
  if (gap > 1e-9 || gap2 > 1e-9) {
    r.pass = false;
    r.detail = "entropy symmetry gaps " + std::to_string(gap) + ", " + std::to_string(gap2);
  }
  return r;
}

BatteryResult full_pipeline_battery(std::uint64_t seed, int threads) {
  BatteryResult r{"feedback-pipeline-at-scale", true, 1, ""};
  PipelineParams pr;
  pr.blocks = 400;
  pr.seed = seed;
  pr.agreement_trials = 8;
  pr.sin_sketch_trials = 100;
  pr.threads = std::max(1, threads);
  PipelineReport rep = feedback_sk_scheme(MacChannel::adder(), std::make_shared<AdderFeedbackCode>(1000, 3.0), pr);
  std::ostringstream os;
  os << "key_rate=" << rep.key_rate << " agreement=" << rep.agreement << " s_in/symbol=" << rep.s_in_per_symbol;
  r.detail = os.str();
  if (!(rep.agreement >= 0.99 && rep.key_rate >= 0.70 && rep.s_in_per_symbol <= 0.05)) r.pass = false;
  return r;
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  VerifyReport rep;
  const bool full = opt.full;
  rep.batteries.push_back(info_kernel_battery(full ? 1000 : 200, opt.seed));
  rep.batteries.push_back(interactive_inequality_battery(full ? 1000 : 200, full ? 50 : 10, opt.seed));
  rep.batteries.push_back(factorization_battery(full ? 1000 : 200, opt.seed));
  rep.batteries.push_back(converse_dominance_battery(full ? 200 : 60, opt.seed));
  rep.batteries.push_back(se_nic_battery(full ? 100 : 30, opt.seed));
  rep.batteries.push_back(pentagon_battery(full ? 200 : 60, opt.seed));
  rep.batteries.push_back(fbcode_battery(full, opt.seed));
  rep.batteries.push_back(tiny_pipeline_battery(opt.seed));
  rep.batteries.push_back(symmetry_battery(opt.seed));
  if (full) rep.batteries.push_back(full_pipeline_battery(opt.seed, opt.threads));
  rep.pass = true;
  for (const auto& b : rep.batteries) rep.pass = rep.pass && b.pass;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace skmac
