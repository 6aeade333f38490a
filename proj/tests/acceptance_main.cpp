// Acceptance suite: runs every shipping criterion at its stated tolerance and
// prints one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "core/bound.hpp"
#include "core/ctproto.hpp"
#include "core/fbcode.hpp"
#include "core/hashext.hpp"
#include "core/iproto.hpp"
#include "core/pipeline.hpp"
#include "core/rates.hpp"
#include "core/verify.hpp"

using namespace skmac;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int id, const std::string& name, bool pass, const std::string& detail, double seconds,
            double budget_s) {
  bool in_time = seconds <= budget_s;
  if (!pass || !in_time) ++g_failures;
  std::printf("[%s] criterion %d: %s  (%s; %.1fs of %.0fs budget)\n",
              (pass && in_time) ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds, budget_s);
  std::fflush(stdout);
}

// 1. R* on the three named channels
void criterion1() {
  Timer t;
  RstarResult a = compute_rstar(MacChannel::adder());
  RstarResult x = compute_rstar(MacChannel::xor_mac());
  RstarResult u = compute_rstar(MacChannel::useless());
  bool pass = std::fabs(a.rate - 0.75) <= 1e-3 && std::fabs(x.rate - 0.5) <= 1e-3 && u.rate == 0.0;
  std::ostringstream os;
  os << "adder=" << a.rate << " xor=" << x.rate << " useless=" << u.rate;
  report(1, "R* computation", pass, os.str(), t.seconds(), 30.0);  // <= 10 s each
}

// 2. feedback code analytic rate and simulated decode error
void criterion2() {
  Timer t;
  double asym = 2.0 / (2.0 + 1.0 / std::log2(3.0));
  double r1e5 = adder_rate_analytic(100000, 2.0);
  bool rate_ok = std::fabs(r1e5 - asym) <= 0.003;
  long long k0 = adder_k0_above_rstar(2.0, 1 << 17);
  bool k0_ok = k0 > 0;
  for (long long k = k0; k0_ok && k <= (1 << 17); ++k)
    if (adder_rate_analytic(static_cast<int>(k), 2.0) <= 0.75) k0_ok = false;
  SimulationResult sim = simulate_code(MacChannel::adder(), AdderFeedbackCode(1000, 4.0), 10000, 2024, 4);
  bool sim_ok = sim.error_prob <= 0.01;
  std::ostringstream os;
  os << "rate(k=1e5,c=2)=" << r1e5 << " (target " << asym << "), k0=" << k0
     << ", sim error=" << sim.error_prob << " [" << sim.ci_low << "," << sim.ci_high << "]";
  report(2, "feedback code rate", rate_ok && k0_ok && sim_ok, os.str(), t.seconds(), 120.0);
}

// 3. end-to-end pipeline on the adder MAC at scale
void criterion3() {
  Timer t;
  PipelineParams pr;
  pr.blocks = 400;
  pr.seed = 7;
  pr.agreement_trials = 12;
  pr.sin_sketch_trials = 150;
  pr.threads = 4;
  PipelineReport rep =
      feedback_sk_scheme(MacChannel::adder(), std::make_shared<AdderFeedbackCode>(1000, 3.0), pr);
  // the analytic rate of the underlying code clears the no-feedback 0.75
  // asymptotically; the empirical key rate carries the finite-length losses
  double asym = 2.0 / (2.0 + 1.0 / std::log2(3.0));
  bool pass = rep.agreement >= 0.99 && rep.key_rate >= 0.70 && rep.s_in_per_symbol <= 0.05 &&
              rep.s_in_mode == "estimate" && asym > 0.75;
  std::ostringstream os;
  os << "key_rate=" << rep.key_rate << " analytic=" << rep.analytic_key_rate << " (asymptote " << asym
     << ") agreement=" << rep.agreement << " s_in/symbol=" << rep.s_in_per_symbol << " (" << rep.s_in_mode
     << ")";
  report(3, "feedback pipeline k=1000 N=400", pass, os.str(), t.seconds(), 600.0);
}

// 4. exact tiny-scale security
void criterion4() {
  Timer t;
  // pipeline at n=4 paired slots (k=2 code), N=6, exact linear-map security
  PipelineParams pr;
  pr.blocks = 6;
  pr.dpa = 0.25;
  pr.seed = 1;
  pr.agreement_trials = 4;
  pr.sin_sketch_trials = 0;
  PipelineReport rep =
      feedback_sk_scheme(MacChannel::adder(), std::make_shared<AdderFeedbackCode>(2, 1.0), pr);
  bool tiny_ok = rep.paired_slots == 4 && rep.blocks == 6 && rep.s_in_mode == "exact" &&
                 rep.s_in_total <= 0.1;

  // cross-check the rank computation against full (K, F) enumeration at k=1, N=2
  PipelineParams pe;
  pe.blocks = 2;
  pe.dpa = 0.3;
  pe.seed = 5;
  pe.agreement_trials = 1;
  pe.sin_sketch_trials = 0;
  AdderFeedbackCode small(1, 1.0);
  AdderPipelineProbe probe = adder_pipeline_probe(small, pe);
  bool maps_ok = true;
  Rng rng(9, 1);
  for (int c = 0; c < 16 && maps_ok; ++c) {
    BitVec msg = BitVec::random(probe.msg_bits, rng);
    auto [f, key] = adder_pipeline_forward(small, pe, msg);
    maps_ok = f == probe.f_map.mul(msg) && key == probe.k_map.mul(msg);
  }
  std::map<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>, double> law;
  std::map<std::vector<std::uint64_t>, double> flaw;
  std::size_t total = static_cast<std::size_t>(1) << probe.msg_bits;
  for (std::size_t v = 0; v < total; ++v) {
    BitVec msg(probe.msg_bits);
    for (int i = 0; i < probe.msg_bits; ++i) msg.set(i, (v >> i) & 1);
    law[{probe.k_map.mul(msg).words(), probe.f_map.mul(msg).words()}] += 1.0 / total;
    flaw[probe.f_map.mul(msg).words()] += 1.0 / total;
  }
  double h_kf = 0.0, h_f = 0.0;
  for (auto& [k, p] : law) h_kf -= xlog2x(p);
  for (auto& [k, p] : flaw) h_f -= xlog2x(p);
  double s_enum = static_cast<double>(probe.key_bits) - (h_kf - h_f);
  PipelineReport rep_small = feedback_sk_scheme(MacChannel::adder(), std::make_shared<AdderFeedbackCode>(1, 1.0), pe);
  bool enum_ok = rep_small.s_in_mode == "exact" && std::fabs(rep_small.s_in_total - s_enum) <= 1e-9;

  // source-emulation adder scheme: s_in exactly zero
  SeSchemeReport se = source_emulation_sk(MacChannel::adder(), 8, {0.75, 0.75}, 3, 0);
  bool se_ok = se.s_in == 0.0 && se.s_in_exact && se.agreement == 1.0 && se.agreement_exact;

  std::ostringstream os;
  os << "pipeline s_in=" << rep.s_in_total << " (" << rep.s_in_mode << "), enumerated s_in=" << s_enum
     << " vs rank " << rep_small.s_in_total << ", SE s_in=" << se.s_in;
  report(4, "exact tiny-scale security", tiny_ok && maps_ok && enum_ok && se_ok, os.str(), t.seconds(),
         300.0);
}

// 5. interactive-communication inequality property suite
void criterion5() {
  Timer t;
  bool pass = true;
  std::string detail = "1000 protocols x 50 partitions hold";
  for (int c = 0; c < 1000 && pass; ++c) {
    Rng rng(derive_seed(505, c), 0x51);
    std::vector<int> obs{2 + static_cast<int>(rng.below(3)), 2 + static_cast<int>(rng.below(3)),
                         2 + static_cast<int>(rng.below(3))};
    InteractiveProtocol proto = random_interactive_protocol(3, 4, 3, rng, obs);
    JointDist src = random_joint_dist(obs, rng);
    for (int p = 0; p < 50 && pass; ++p) {
      FractionalPartition lam = random_fractional_partition(3, rng);
      InteractiveCheck chk = check_interactive_inequality(proto, src, lam);
      if (!chk.holds) {
        pass = false;
        detail = "violation at protocol " + std::to_string(c) + " partition " + std::to_string(p);
      }
    }
  }
  // negative control: the xor transcript reproduces lhs=1, rhs=2 exactly
  DirectTranscript tr;
  tr.alphabet = 2;
  tr.table = {0, 1, 1, 0};
  Partition two{2, {1u, 2u}};
  InteractiveCheck chk =
      check_interactive_inequality(tr, JointDist::uniform({2, 2}), partition_to_fractional(two));
  if (!(chk.lhs == 1.0 && chk.rhs == 2.0 && !chk.holds)) {
    pass = false;
    detail = "xor control lhs=" + std::to_string(chk.lhs) + " rhs=" + std::to_string(chk.rhs);
  }
  report(5, "interactive inequality suite", pass, detail, t.seconds(), 300.0);
}

// 6. factorization-preservation property suite
void criterion6() {
  Timer t;
  bool pass = true;
  std::string detail = "1000 product-law protocols keep gap <= 1e-9";
  for (int c = 0; c < 1000 && pass; ++c) {
    Rng rng(derive_seed(606, c), 0x61);
    std::vector<int> obs{2 + static_cast<int>(rng.below(3)), 2 + static_cast<int>(rng.below(3)),
                         2 + static_cast<int>(rng.below(3))};
    InteractiveProtocol proto = random_interactive_protocol(3, 4, 3, rng, obs);
    JointDist src = random_product_dist(obs, rng);
    double gap = check_factorization(proto, src);
    if (gap > 1e-9) {
      pass = false;
      detail = "gap " + std::to_string(gap) + " at protocol " + std::to_string(c);
    }
  }
  DirectTranscript tr;
  tr.alphabet = 2;
  tr.table = {0, 1, 1, 0};
  double genie = check_factorization(tr, JointDist::uniform({2, 2}));
  if (std::fabs(genie - 1.0) > 1e-9) {
    pass = false;
    detail = "genie xor gap " + std::to_string(genie);
  }
  report(6, "factorization suite", pass, detail, t.seconds(), 300.0);
}

// 7. one-shot converse dominance over simulated protocols
void criterion7() {
  Timer t;
  bool pass = true;
  std::string detail = "200 protocols bounded; LP dominates partitions (m <= 4)";
  MacChannel channels[3] = {MacChannel::adder(), MacChannel::xor_mac(), MacChannel::noisy_adder(0.05)};
  for (int c = 0; c < 200 && pass; ++c) {
    Rng rng(derive_seed(707, c), 0x71);
    const MacChannel& ch = channels[rng.below(3)];
    CtProtocol proto = random_ct_protocol(Restriction::kGeneral, 1 + static_cast<int>(rng.below(2)), ch, rng);
    auto paths = enumerate_protocol(proto, ch);
    KeyMetrics km = key_metrics_exact(proto, paths);
    JointDist law = view_law(proto, paths);
    double eps = std::min(0.999, std::max(0.0, 1.0 - km.agreement));
    BestBound bb = best_bound_lp(law, {{0}, {1}, {2}});
    ConverseBoundResult b = one_shot_bound(law, {{0}, {1}, {2}}, {3}, {4}, bb.lam, eps);
    double log_k = std::log2(static_cast<double>(proto.keys().alphabet));
    if (log_k > b.bound_bits + 1e-6) {
      pass = false;
      detail = "bound violated at protocol " + std::to_string(c);
    }
    for (const auto& pi : enumerate_partitions(3)) {
      ConverseBoundResult bp = one_shot_bound(law, {{0}, {1}, {2}}, {3}, {4}, pi, eps);
      if (bp.penalty > bb.penalty + 1e-8) {
        pass = false;
        detail = "penalty dominance failed (m=3) at protocol " + std::to_string(c);
      }
    }
  }
  // LP dominance over all partitions on random 4-terminal laws
  for (int c = 0; c < 60 && pass; ++c) {
    Rng rng(derive_seed(708, c), 0x72);
    JointDist law = random_joint_dist({2, 2, 2, 2}, rng);
    BestBound bb = best_bound_lp(law, {{0}, {1}, {2}, {3}});
    for (const auto& pi : enumerate_partitions(4)) {
      FractionalPartition lam = partition_to_fractional(pi);
      double v = 0.0;
      for (std::uint32_t mask = 1; mask + 1 < (1u << 4); ++mask) {
        if (lam.weight(mask) == 0.0) continue;
        std::vector<int> b, bc;
        for (int i = 0; i < 4; ++i) (mask & (1u << i) ? b : bc).push_back(i);
        v += lam.weight(mask) * law.conditional_entropy(b, bc);
      }
      if (v > bb.penalty + 1e-8) {
        pass = false;
        detail = "penalty dominance failed (m=4) at law " + std::to_string(c);
      }
    }
  }
  report(7, "one-shot converse dominance", pass, detail, t.seconds(), 300.0);
}

// 8. SE/NIC rate operationalization
void criterion8() {
  Timer t;
  bool pass = true;
  std::string detail = "100 SE + 100 NIC protocols bounded";
  MacChannel ch = MacChannel::adder();
  for (int kind = 0; kind < 2 && pass; ++kind) {
    Restriction restr = kind == 0 ? Restriction::kSe : Restriction::kNic;
    for (int c = 0; c < 100 && pass; ++c) {
      Rng rng(derive_seed(808 + kind, c), 0x81);
      int n = 1 + static_cast<int>(rng.below(3));
      CtProtocol proto = random_ct_protocol(restr, n, ch, rng, /*binary_u=*/true);
      auto paths = enumerate_protocol(proto, ch);
      KeyMetrics km = key_metrics_exact(proto, paths);
      double log_k = std::log2(static_cast<double>(proto.keys().alphabet));
      double eps = std::min(0.999, std::max(0.0, 1.0 - km.agreement));
      double nu = 5.0 * (eps * log_k + binary_entropy(eps));
      double rate = restr == Restriction::kSe ? n_letter_rate_se(se_trace_law(proto, paths), n)
                                              : n_letter_rate_nic(nic_trace_law(proto, paths), n);
      if ((log_k - km.s_in) / n > rate + nu / n + 1e-6) {
        pass = false;
        detail = std::string(kind == 0 ? "SE" : "NIC") + " violation at protocol " + std::to_string(c);
      }
    }
  }
  report(8, "SE/NIC bound operationalization", pass, detail, t.seconds(), 300.0);
}

// 9. verify-suite quick: passes, fast, and deterministic
void criterion9() {
  Timer t;
  VerifyOptions opt;
  opt.full = false;
  opt.seed = 1;
  VerifyReport r1 = run_verify(opt);
  VerifyReport r2 = run_verify(opt);
  bool deterministic = r1.batteries.size() == r2.batteries.size();
  for (std::size_t i = 0; deterministic && i < r1.batteries.size(); ++i)
    deterministic = r1.batteries[i].name == r2.batteries[i].name &&
                    r1.batteries[i].pass == r2.batteries[i].pass &&
                    r1.batteries[i].cases == r2.batteries[i].cases &&
                    r1.batteries[i].detail == r2.batteries[i].detail;
  bool pass = r1.pass && r1.seconds <= 60.0 && deterministic;
  std::ostringstream os;
  os << "quick pass=" << (r1.pass ? "yes" : "no") << " in " << r1.seconds
     << "s, deterministic=" << (deterministic ? "yes" : "no");
  if (!r1.pass)
    for (const auto& b : r1.batteries)
      if (!b.pass) os << "; failed: " << b.name << " (" << b.detail << ")";
  report(9, "verify-suite quick", pass, os.str(), t.seconds(), 150.0);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
