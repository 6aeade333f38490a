#include <doctest.h>

#include <cmath>

#include "core/ctproto.hpp"
#include "core/rates.hpp"

using namespace skmac;

TEST_CASE("pentagon corner values") {
  FiniteDist u2 = FiniteDist::uniform(2);
  PentagonRates a = pentagon(MacChannel::adder(), u2, u2);
  CHECK(a.i1 == doctest::Approx(1.0));
  CHECK(a.i2 == doctest::Approx(1.0));
  CHECK(a.isum == doctest::Approx(1.5));

  PentagonRates x = pentagon(MacChannel::xor_mac(), u2, u2);
  CHECK(x.i1 == doctest::Approx(1.0));
  CHECK(x.i2 == doctest::Approx(1.0));
  CHECK(x.isum == doctest::Approx(1.0));

  PentagonRates z = pentagon(MacChannel::useless(), u2, u2);
  CHECK(z.i1 == doctest::Approx(0.0));
  CHECK(z.i2 == doctest::Approx(0.0));
  CHECK(z.isum == doctest::Approx(0.0));
}

TEST_CASE("pentagon shape invariant on random inputs") {
  Rng rng(3, 9);
  for (int c = 0; c < 200; ++c) {
    double p = rng.uniform01(), q = rng.uniform01();
    const MacChannel& ch = c % 2 ? MacChannel::adder() : MacChannel::noisy_adder(0.05);
    PentagonRates pr = pentagon(ch, FiniteDist({p, 1 - p}), FiniteDist({q, 1 - q}));
    CHECK(pr.i1 >= -1e-12);
    CHECK(pr.i2 >= -1e-12);
    CHECK(std::max(pr.i1, pr.i2) <= pr.isum + 1e-9);
    CHECK(pr.isum <= pr.i1 + pr.i2 + 1e-9);
  }
}

TEST_CASE("hull diagonal value") {
  // square spanned by (1,0) and (0,1): diagonal meets the segment at 0.5
  CHECK(hull_diagonal_value({{1, 0}, {0, 1}}) == doctest::Approx(0.5));
  // pentagon corner dominance
  CHECK(hull_diagonal_value({{1, 0}, {0, 1}, {1, 0.5}, {0.5, 1}}) == doctest::Approx(0.75));
  CHECK(hull_diagonal_value({{0, 0}}) == doctest::Approx(0.0));
  CHECK(hull_diagonal_value({{2, 2}}) == doctest::Approx(2.0));
}

TEST_CASE("rstar on the named channels") {
  RstarResult a = compute_rstar(MacChannel::adder());
  CHECK(std::fabs(a.rate - 0.75) <= 1e-3);
  CHECK(a.rate >= a.best_single_pentagon - 1e-9);
  CHECK(a.rate <= a.max_isum_half + 1e-9);

  RstarResult nz = compute_rstar(MacChannel::noisy_adder(0.05));
  CHECK(nz.rate >= nz.best_single_pentagon - 1e-9);
  CHECK(nz.rate <= nz.max_isum_half + 1e-9);

  RstarResult x = compute_rstar(MacChannel::xor_mac());
  CHECK(std::fabs(x.rate - 0.5) <= 1e-3);

  RstarResult u = compute_rstar(MacChannel::useless());
  CHECK(u.rate == 0.0);

  MacChannel big(9, 2, 2, std::vector<double>(9 * 2 * 2, 0.5));
  CHECK_THROWS_AS(compute_rstar(big), InvalidArgumentError);
}

TEST_CASE("n-letter nic rate on identity-encoder traces") {
  // U1, U2 uniform bits, n=1 adder, identity inputs, U3 constant
  std::vector<double> t(2 * 2 * 1 * 3, 0.0);
  for (int u1 = 0; u1 < 2; ++u1)
    for (int u2 = 0; u2 < 2; ++u2) t[((u1 * 2 + u2) * 1 + 0) * 3 + (u1 + u2)] = 0.25;
  JointDist law({2, 2, 1, 3}, t);
  CHECK(n_letter_rate_nic(law, 1) == doctest::Approx(0.75));

  // constant inputs -> 0
  std::vector<double> tc(2 * 2 * 1 * 3, 0.0);
  for (int u1 = 0; u1 < 2; ++u1)
    for (int u2 = 0; u2 < 2; ++u2) tc[((u1 * 2 + u2) * 1 + 0) * 3 + 0] = 0.25;
  CHECK(n_letter_rate_nic(JointDist({2, 2, 1, 3}, tc), 1) == doctest::Approx(0.0));

  // xor identity encoders
  std::vector<double> tx(2 * 2 * 1 * 2, 0.0);
  for (int u1 = 0; u1 < 2; ++u1)
    for (int u2 = 0; u2 < 2; ++u2) tx[((u1 * 2 + u2) * 1 + 0) * 2 + (u1 ^ u2)] = 0.25;
  CHECK(n_letter_rate_nic(JointDist({2, 2, 1, 2}, tx), 1) == doctest::Approx(0.5));

  CHECK_THROWS_AS(n_letter_rate_nic(JointDist::uniform({2, 2}), 1), InvalidArgumentError);
}

namespace {

// i.i.d.-input SE trace with U_i equal to the input string itself, U3 constant
JointDist iid_se_trace(const MacChannel& ch, double p, double q, int n) {
  JointDist push = ch.pushforward(FiniteDist({p, 1 - p}), FiniteDist({q, 1 - q}), n);
  int a1 = push.arity(0), a2 = push.arity(1), a3 = push.arity(2);
  std::vector<double> t(static_cast<std::size_t>(a1) * a1 * a2 * a2 * a3, 0.0);
  std::vector<int> sym(3);
  for (std::size_t idx = 0; idx < push.table_size(); ++idx) {
    if (push.table()[idx] == 0.0) continue;
    push.symbols_of(idx, sym);
    std::size_t j =
        (((static_cast<std::size_t>(sym[0]) * a1 + sym[0]) * a2 + sym[1]) * a2 + sym[1]) * a3 + sym[2];
    t[j] += push.table()[idx];
  }
  return JointDist({a1, a1, a2, a2, a3, 1}, std::move(t));
}

}  // namespace

TEST_CASE("n-letter se rate is additive over memoryless blocks") {
  for (auto [p, q] : {std::pair{0.5, 0.5}, std::pair{0.3, 0.5}, std::pair{0.25, 0.7}}) {
    PentagonRates pr = pentagon(MacChannel::adder(), FiniteDist({p, 1 - p}), FiniteDist({q, 1 - q}));
    double single = std::min({pr.i1, pr.i2, pr.isum / 2.0});
    for (int n = 1; n <= 3; ++n) {
      JointDist law = iid_se_trace(MacChannel::adder(), p, q, n);
      CHECK(n_letter_rate_se(law, n) == doctest::Approx(single).epsilon(1e-6));
    }
  }
  // deterministic inputs -> 0
  JointDist law = iid_se_trace(MacChannel::adder(), 1.0, 1.0, 2);
  CHECK(n_letter_rate_se(law, 2) == doctest::Approx(0.0));
}
