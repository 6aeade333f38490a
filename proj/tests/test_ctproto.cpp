#include <doctest.h>

#include <cmath>

#include "core/bound.hpp"
#include "core/ctproto.hpp"
#include "core/rates.hpp"

using namespace skmac;

namespace {

// n=1 adder: identity inputs, empty rounds except the final one where
// terminal 1 announces u1; keys all equal that announcement.
CtProtocol announce_protocol() {
  CtSlotComm empty;
  CtSlotComm last;
  CtMsg msg;
  msg.sender = 1;
  msg.alphabet = 2;
  msg.table = {0, 1};  // view u1, transcript space 1
  last.msgs.push_back(msg);
  std::vector<std::vector<int>> in1{{0, 1}}, in2{{0, 1}};  // identity of own u
  CtKeyMaps keys;
  keys.alphabet = 2;
  keys.target = 1;
  keys.k1 = {0, 0, 1, 1};        // u1 * 2 + tid -> u1
  keys.k2 = {0, 1, 0, 1};        // u2 * 2 + tid -> tid
  keys.k3.assign(1 * 3 * 2, 0);  // (u3 * 3 + y) * 2 + tid -> tid
  for (std::size_t i = 0; i < keys.k3.size(); ++i) keys.k3[i] = static_cast<int>(i % 2);
  return CtProtocol(1, {2, 2, 1}, 2, 2, 3, Restriction::kGeneral, {empty, last}, in1, in2, keys);
}

// n=2 adder instance of the source-emulation scheme: user 1 sends m1 in slot
// 1, user 2 sends m2 in slot 2, terminal 3 announces m1 xor m2 at the end.
CtProtocol se_otp_protocol(bool with_f1) {
  int u1 = with_f1 ? 4 : 2;  // optional auxiliary public bit in u1's high part
  CtSlotComm first;
  if (with_f1) {
    CtMsg aux;
    aux.sender = 1;
    aux.alphabet = 2;
    aux.table = {0, 0, 1, 1};  // announce the aux bit (u1 div 2)
    first.msgs.push_back(aux);
  }
  std::size_t t1 = with_f1 ? 2 : 1;  // transcript space after round 1
  CtSlotComm mid;                    // slot-2 round stays silent
  CtSlotComm last;
  CtMsg sum;
  sum.sender = 3;
  sum.alphabet = 2;
  // view = u3 * 9 + (y0 + 3*y1), transcript id < t1
  sum.table.assign(9 * t1, 0);
  for (int y0 = 0; y0 < 3; ++y0)
    for (int y1 = 0; y1 < 3; ++y1)
      for (std::size_t tid = 0; tid < t1; ++tid)
        sum.table[(y0 + 3 * y1) * t1 + tid] = (y0 & 1) ^ (y1 & 1);
  last.msgs.push_back(sum);

  std::vector<std::vector<int>> in1(2), in2(2);
  in1[0].assign(u1 * t1, 0);
  for (int u = 0; u < u1; ++u)
    for (std::size_t tid = 0; tid < t1; ++tid) in1[0][u * t1 + tid] = u & 1;  // m1
  in2[0].assign(2 * t1, 0);                                                  // silent
  in1[1].assign(u1 * t1, 0);                                                 // silent
  in2[1].assign(2 * t1, 0);
  for (int u = 0; u < 2; ++u)
    for (std::size_t tid = 0; tid < t1; ++tid) in2[1][u * t1 + tid] = u;  // m2

  std::size_t ts = t1 * 2;  // final transcript space
  CtKeyMaps keys;
  keys.alphabet = 2;
  keys.target = 1;
  keys.k1.assign(u1 * ts, 0);
  for (int u = 0; u < u1; ++u)
    for (std::size_t tid = 0; tid < ts; ++tid) keys.k1[u * ts + tid] = u & 1;  // K = m1
  keys.k2.assign(2 * ts, 0);
  for (int u = 0; u < 2; ++u)
    for (std::size_t tid = 0; tid < ts; ++tid)
      keys.k2[u * ts + tid] = static_cast<int>((tid / t1) ^ static_cast<std::size_t>(u));  // f xor m2
  keys.k3.assign(1 * 9 * ts, 0);
  for (int y0 = 0; y0 < 3; ++y0)
    for (int y1 = 0; y1 < 3; ++y1)
      for (std::size_t tid = 0; tid < ts; ++tid) keys.k3[(y0 + 3 * y1) * ts + tid] = y0 & 1;  // y0 = m1
  return CtProtocol(2, {u1, 2, 1}, 2, 2, 3, Restriction::kSe, {first, mid, last}, in1, in2, keys);
}

}  // namespace

TEST_CASE("executor semantics on the announce protocol") {
  CtProtocol p = announce_protocol();
  MacChannel adder = MacChannel::adder();
  SkTrace tr = run_protocol(p, adder, 5);
  CHECK(tr.x3[0] == tr.x1[0] + tr.x2[0]);
  CHECK(tr.k1 == tr.u1);
  CHECK(tr.k2 == tr.k1);
  CHECK(tr.k3 == tr.k1);

  auto paths = enumerate_protocol(p, adder);
  CHECK(paths.size() == 4);  // u1 x u2, deterministic channel
  KeyMetrics km = key_metrics_exact(p, paths);
  CHECK(km.agreement == doctest::Approx(1.0));
  CHECK(km.s_in == doctest::Approx(1.0));  // key is fully public
  CHECK(km.weak_rate == doctest::Approx(1.0));
}

TEST_CASE("restriction flags are enforced at construction") {
  CtSlotComm empty;
  CtSlotComm mid;
  CtMsg m;
  m.sender = 1;
  m.alphabet = 2;
  m.table = {0, 1};
  mid.msgs.push_back(m);
  std::vector<std::vector<int>> in1{{0, 1}, {0, 0, 1, 1}}, in2{{0, 1}, {0, 0, 1, 1}};
  CtKeyMaps keys;
  keys.alphabet = 1;
  keys.k1.assign(2 * 2, 0);
  keys.k2.assign(2 * 2, 0);
  keys.k3.assign(9 * 2, 0);
  // SE cannot speak in slot 2
  CHECK_THROWS_AS(CtProtocol(2, {2, 2, 1}, 2, 2, 3, Restriction::kSe, {empty, mid, empty}, in1, in2, keys),
                  InvalidArgumentError);
  // an explicitly constant message is fine under SE
  CtSlotComm constant_round;
  CtMsg cmsg;
  cmsg.sender = 1;
  cmsg.alphabet = 1;
  cmsg.table = {0, 0};
  constant_round.msgs.push_back(cmsg);
  std::vector<std::vector<int>> in1c{{0, 1}, {0, 1}}, in2c{{0, 1}, {0, 1}};
  CtKeyMaps keysc;
  keysc.alphabet = 1;
  keysc.k1.assign(2, 0);
  keysc.k2.assign(2, 0);
  keysc.k3.assign(9, 0);
  CHECK_NOTHROW(
      CtProtocol(2, {2, 2, 1}, 2, 2, 3, Restriction::kSe, {empty, constant_round, empty}, in1c, in2c, keysc));
  // NIC allows only terminal 3 in slot 2
  CHECK_THROWS_AS(CtProtocol(2, {2, 2, 1}, 2, 2, 3, Restriction::kNic, {empty, mid, empty}, in1, in2, keys),
                  InvalidArgumentError);
  // terminal 3 speaking in slot 2 is a valid NIC protocol
  CtSlotComm mid3;
  CtMsg echo;
  echo.sender = 3;
  echo.alphabet = 3;
  echo.table = {0, 1, 2};  // view = u3 * 3 + y0, echoes y0
  mid3.msgs.push_back(echo);
  std::vector<std::vector<int>> in1b{{0, 1}, std::vector<int>(2 * 3, 0)};
  std::vector<std::vector<int>> in2b{{0, 1}, std::vector<int>(2 * 3, 0)};
  // slot-2 inputs may depend on the echoed output
  for (int u = 0; u < 2; ++u)
    for (int f = 0; f < 3; ++f) in1b[1][u * 3 + f] = (f == 1) ? 1 : 0;
  CtKeyMaps keys3;
  keys3.alphabet = 1;
  keys3.k1.assign(2 * 3, 0);
  keys3.k2.assign(2 * 3, 0);
  keys3.k3.assign(9 * 3, 0);
  CtProtocol nic(2, {2, 2, 1}, 2, 2, 3, Restriction::kNic, {empty, mid3, empty}, in1b, in2b, keys3);
  auto paths = enumerate_protocol(nic, MacChannel::adder());
  for (const auto& path : paths) CHECK(path.x1[1] == (path.x3[0] == 1 ? 1 : 0));
}

TEST_CASE("exhaustive enumeration matches Monte Carlo") {
  MacChannel noisy = MacChannel::noisy_adder(0.05);
  Rng rng(31, 7);
  CtProtocol p = random_ct_protocol(Restriction::kGeneral, 2, noisy, rng);
  auto paths = enumerate_protocol(p, noisy);
  double mass = 0.0;
  for (const auto& path : paths) mass += path.prob;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));

  KeyMetrics exact = key_metrics_exact(p, paths);
  const int trials = 4000;
  std::vector<SkTrace> traces;
  traces.reserve(trials);
  for (int i = 0; i < trials; ++i) traces.push_back(run_protocol(p, noisy, derive_seed(99, i)));
  KeyMetrics sampled = key_metrics_sampled(p, traces);
  double sigma = std::sqrt(std::max(exact.agreement * (1 - exact.agreement), 1e-6) / trials);
  CHECK(std::fabs(sampled.agreement - exact.agreement) <= 3.0 * sigma + 1e-9);
  CHECK(!sampled.exact);
}

TEST_CASE("source-emulation one-time-pad protocol") {
  MacChannel adder = MacChannel::adder();
  CtProtocol p = se_otp_protocol(false);
  auto paths = enumerate_protocol(p, adder);
  KeyMetrics km = key_metrics_exact(p, paths);
  CHECK(km.agreement == doctest::Approx(1.0));
  CHECK(km.s_in == doctest::Approx(0.0));

  // the SE rate expression dominates the key content
  double rate = n_letter_rate_se(se_trace_law(p, paths), p.n());
  CHECK(1.0 / p.n() <= rate + 1e-9);

  // end-to-end converse: log|K| bounded by the one-shot bound, LP lambda
  JointDist law = view_law(p, paths);
  BestBound bb = best_bound_lp(law, {{0}, {1}, {2}});
  ConverseBoundResult b = one_shot_bound(law, {{0}, {1}, {2}}, {3}, {4}, bb.lam, 0.0);
  CHECK(std::log2(2.0) <= b.bound_bits + 1e-9);
}

TEST_CASE("f1 reduction on a protocol with a nontrivial first round") {
  MacChannel adder = MacChannel::adder();
  CtProtocol p = se_otp_protocol(true);
  auto paths = enumerate_protocol(p, adder);
  KeyMetrics km = key_metrics_exact(p, paths);
  CHECK(km.agreement == doctest::Approx(1.0));
  CHECK(km.s_in == doctest::Approx(0.0));

  std::size_t f1_space = 0;
  JointDist law = f1_law(p, paths, &f1_space);
  CHECK(f1_space == 2);
  F1Reduction red = f1_constant_reduction(law, 3, {5}, {6}, {7}, {8}, {4}, 0.1);
  CHECK(red.f1_star == 0);
  // conditioned randomization stays mutually independent
  JointDist u = red.conditioned.marginal({0, 1, 2});
  JointDist prod = u.product_of_marginals({{0}, {1}, {2}});
  for (std::size_t i = 0; i < u.table_size(); ++i)
    CHECK(u.table()[i] == doctest::Approx(prod.table()[i]).epsilon(1e-9));
}

TEST_CASE("random protocols satisfy the nic and se operational bounds") {
  MacChannel adder = MacChannel::adder();
  Rng rng(77, 8);
  for (int c = 0; c < 60; ++c) {
    Restriction restr = c % 2 ? Restriction::kSe : Restriction::kNic;
    int n = 1 + static_cast<int>(rng.below(3));
    CtProtocol p = random_ct_protocol(restr, n, adder, rng);
    auto paths = enumerate_protocol(p, adder);
    KeyMetrics km = key_metrics_exact(p, paths);
    double log_k = std::log2(static_cast<double>(p.keys().alphabet));
    double eps = std::min(0.999, std::max(0.0, 1.0 - km.agreement));
    double nu = 5.0 * (eps * log_k + binary_entropy(eps));
    double rate = restr == Restriction::kSe ? n_letter_rate_se(se_trace_law(p, paths), n)
                                            : n_letter_rate_nic(nic_trace_law(p, paths), n);
    CHECK((log_k - km.s_in - nu) / n <= rate + 1e-6);
  }
}
