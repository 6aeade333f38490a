#include <doctest.h>

#include <cmath>

#include "core/bound.hpp"
#include "core/iproto.hpp"

using namespace skmac;

namespace {

// law over (Y1, Y2, K, F): Y1 = Y2 uniform bit, K = Y1, F constant
JointDist common_bit_law() {
  std::vector<double> t(2 * 2 * 2 * 1, 0.0);
  for (int y = 0; y < 2; ++y) t[((y * 2 + y) * 2 + y) * 1] = 0.5;
  return JointDist({2, 2, 2, 1}, std::move(t));
}

}  // namespace

TEST_CASE("one-shot bound on the shared-bit source") {
  JointDist law = common_bit_law();
  Partition pi{2, {0b01, 0b10}};
  ConverseBoundResult r = one_shot_bound(law, {{0}, {1}}, {2}, {3}, pi, 0.01);
  double core = r.bound_bits - r.nu - r.s_in;
  CHECK(core == doctest::Approx(1.0).epsilon(1e-9));  // I(Y1; Y2)
  CHECK(r.bound_bits >= 1.0);
  CHECK(r.corollary_bound.has_value());
  CHECK(*r.corollary_bound == doctest::Approx(r.bound_bits).epsilon(1e-9));
  CHECK(r.bound_bits == doctest::Approx(r.h_total - r.penalty + r.s_in + r.nu).epsilon(1e-12));
}

TEST_CASE("independent sources have no extractable common randomness") {
  // Y1, Y2 independent bits, K derived from Y1 revealed... keep K constant
  std::vector<double> t(2 * 2 * 1 * 1, 0.25);
  JointDist law({2, 2, 1, 1}, std::move(t));
  Partition pi{2, {0b01, 0b10}};
  ConverseBoundResult r = one_shot_bound(law, {{0}, {1}}, {2}, {3}, pi, 0.01);
  CHECK(r.bound_bits - r.nu - r.s_in == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("xor triple divergence equals half a bit per the corollary") {
  // (Y1,Y2,Y3) xor triple plus constant K, F
  std::vector<double> t(2 * 2 * 2 * 1 * 1, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) t[(a * 2 + b) * 2 + (a ^ b)] = 0.25;
  JointDist law({2, 2, 2, 1, 1}, std::move(t));
  Partition pi{3, {0b001, 0b010, 0b100}};
  ConverseBoundResult r = one_shot_bound(law, {{0}, {1}, {2}}, {3}, {4}, pi, 0.5);
  // (1/(k-1)) D(P || prod P_i) = (H1+H2+H3-H123)/2 = 0.5
  CHECK(*r.corollary_bound - r.s_in - r.nu == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.h_total - r.penalty == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("corollary equals the fractional form for partition lambdas") {
  Rng rng(17, 6);
  for (int c = 0; c < 40; ++c) {
    JointDist src = random_joint_dist({2, 2, 3, 2, 2}, rng);
    for (const auto& pi : enumerate_partitions(3)) {
      ConverseBoundResult r = one_shot_bound(src, {{0}, {1}, {2}}, {3}, {4}, pi, 0.1);
      REQUIRE(r.corollary_bound.has_value());
      CHECK(*r.corollary_bound == doctest::Approx(r.bound_bits).epsilon(1e-9));
    }
  }
}

TEST_CASE("eps validation") {
  JointDist law = common_bit_law();
  Partition pi{2, {0b01, 0b10}};
  CHECK_THROWS_AS(one_shot_bound(law, {{0}, {1}}, {2}, {3}, pi, 1.0), InvalidArgumentError);
  CHECK_THROWS_AS(one_shot_bound(law, {{0}, {1}}, {2}, {3}, pi, -0.1), InvalidArgumentError);
  CHECK_NOTHROW(one_shot_bound(law, {{0}, {1}}, {2}, {3}, pi, 0.0));
}

TEST_CASE("f1 reduction trivial cases") {
  // law vars: (U1, U2, U3, F1, Frest, K1, K2, K3, K)
  // F1 constant: identity reduction picks f1 = 0
  std::vector<double> t;
  // U1,U2,U3 uniform bits; K1=K2=K3=K=U1; F1 const; Frest = U1 (public key!)
  std::vector<int> arity{2, 2, 2, 1, 2, 2, 2, 2, 2};
  std::size_t total = 1;
  for (int a : arity) total *= a;
  t.assign(total, 0.0);
  JointDist shape = JointDist::uniform(arity);
  for (int u1 = 0; u1 < 2; ++u1)
    for (int u2 = 0; u2 < 2; ++u2)
      for (int u3 = 0; u3 < 2; ++u3)
        t[shape.index_of({u1, u2, u3, 0, u1, u1, u1, u1, u1})] = 0.125;
  JointDist law(arity, std::move(t));
  // fully public key: log|K| - H(K|F) = 1, needs eps >= 0.5
  F1Reduction red = f1_constant_reduction(law, 3, {5}, {6}, {7}, {8}, {4}, 0.5);
  CHECK(red.f1_star == 0);
  CHECK(red.conditioned.num_vars() == 8);
  CHECK_THROWS_AS(f1_constant_reduction(law, 3, {5}, {6}, {7}, {8}, {4}, 0.05), InvalidArgumentError);
}

TEST_CASE("f1 reduction keeps conditional independence and picks lowest index") {
  // U1, U2 uniform bits; F1 = fair coin from terminal 3 (independent of all);
  // keys constant; vars (U1, U2, U3, F1, Frest, K1, K2, K3, K)
  std::vector<int> arity{2, 2, 2, 2, 1, 1, 1, 1, 1};
  JointDist shape = JointDist::uniform(arity);
  std::vector<double> t(shape.table_size(), 0.0);
  for (int u1 = 0; u1 < 2; ++u1)
    for (int u2 = 0; u2 < 2; ++u2)
      for (int u3 = 0; u3 < 2; ++u3)
        for (int f1 = 0; f1 < 2; ++f1) t[shape.index_of({u1, u2, u3, f1, 0, 0, 0, 0, 0})] = 1.0 / 16;
  JointDist law(arity, std::move(t));
  F1Reduction red = f1_constant_reduction(law, 3, {5}, {6}, {7}, {8}, {4}, 0.1);
  CHECK(red.f1_star == 0);  // both qualify, lowest index wins
  // conditioned U1,U2,U3 remain mutually independent
  JointDist u = red.conditioned.marginal({0, 1, 2});
  JointDist prod = u.product_of_marginals({{0}, {1}, {2}});
  for (std::size_t i = 0; i < u.table_size(); ++i)
    CHECK(u.table()[i] == doctest::Approx(prod.table()[i]).epsilon(1e-9));
}
