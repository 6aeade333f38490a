#include <doctest.h>

#include <cmath>

#include "core/dist.hpp"
#include "core/iproto.hpp"
#include "core/schema.hpp"

using namespace skmac;

TEST_CASE("entropy basics") {
  JointDist ub({2}, {0.5, 0.5});
  CHECK(ub.entropy({0}) == doctest::Approx(1.0).epsilon(1e-12));

  JointDist point({3}, {0.0, 1.0, 0.0});
  CHECK(point.entropy({0}) == doctest::Approx(0.0));

  JointDist u3({3}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(u3.entropy({0}) == doctest::Approx(std::log2(3.0)).epsilon(1e-12));

  CHECK_THROWS_AS(ub.entropy({}), InvalidArgumentError);
  CHECK_THROWS_AS(ub.entropy({1}), InvalidArgumentError);
}

TEST_CASE("conditional entropy") {
  // copied bit
  JointDist copied({2, 2}, {0.5, 0.0, 0.0, 0.5});
  CHECK(copied.conditional_entropy({0}, {1}) == doctest::Approx(0.0));

  JointDist indep = JointDist::uniform({2, 2});
  CHECK(indep.conditional_entropy({0}, {1}) == doctest::Approx(1.0));

  // binary symmetric pair with crossover 0.11
  double p = 0.11;
  JointDist bsc({2, 2}, {(1 - p) / 2, p / 2, p / 2, (1 - p) / 2});
  CHECK(bsc.conditional_entropy({0}, {1}) == doctest::Approx(binary_entropy(p)).epsilon(1e-9));

  CHECK_THROWS_AS(copied.conditional_entropy({0}, {0}), InvalidArgumentError);
}

TEST_CASE("mutual information on the xor triple") {
  // Y3 = Y1 xor Y2, uniform inputs
  std::vector<double> t(8, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) t[(a * 2 + b) * 2 + (a ^ b)] = 0.25;
  JointDist x({2, 2, 2}, t);
  CHECK(x.mutual_information({0}, {2}, {1}) == doctest::Approx(1.0));
  CHECK(x.mutual_information({0}, {2}) == doctest::Approx(0.0));
  CHECK(JointDist::uniform({2, 2}).mutual_information({0}, {1}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(x.mutual_information({0}, {0}), InvalidArgumentError);
}

TEST_CASE("kl divergence") {
  JointDist p({2}, {1.0, 0.0});
  JointDist q({2}, {0.5, 0.5});
  CHECK(JointDist::kl_divergence(p, q) == doctest::Approx(1.0));
  CHECK(JointDist::kl_divergence(q, q) == doctest::Approx(0.0));
  CHECK(std::isinf(JointDist::kl_divergence(q, p)));
  CHECK_THROWS_AS(JointDist::kl_divergence(p, JointDist({3}, {0.5, 0.25, 0.25})), InvalidArgumentError);

  // D(P_{Y1Y2} || P_{Y1} x P_{Y2}) = I(Y1;Y2)
  Rng rng(7, 1);
  JointDist j = random_joint_dist({3, 4}, rng);
  double kl = JointDist::kl_divergence(j, j.product_of_marginals({{0}, {1}}));
  CHECK(kl == doctest::Approx(j.mutual_information({0}, {1})).epsilon(1e-10));
}

TEST_CASE("security index") {
  // K uniform independent of F
  JointDist indep = JointDist::uniform({2, 3});
  CHECK(indep.security_index({0}, {1}) == doctest::Approx(0.0));

  // K fully revealed, |K| = 2
  JointDist leak({2, 2}, {0.5, 0.0, 0.0, 0.5});
  CHECK(leak.security_index({0}, {1}) == doctest::Approx(1.0));

  // F = K with prob 1/2 else an erasure symbol
  std::vector<double> t(2 * 3, 0.0);
  for (int k = 0; k < 2; ++k) {
    t[k * 3 + k] = 0.25;
    t[k * 3 + 2] = 0.25;
  }
  JointDist half({2, 3}, t);
  CHECK(half.security_index({0}, {1}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("channel pushforward") {
  MacChannel adder = MacChannel::adder();
  JointDist j1 = adder.pushforward(FiniteDist::uniform(2), FiniteDist::uniform(2), 1);
  JointDist out = j1.marginal({2});
  CHECK(out.table()[0] == doctest::Approx(0.25));
  CHECK(out.table()[1] == doctest::Approx(0.5));
  CHECK(out.table()[2] == doctest::Approx(0.25));

  // deterministic channel, point-mass inputs -> point-mass joint
  JointDist pm = adder.pushforward(FiniteDist::point_mass(2, 1), FiniteDist::point_mass(2, 1), 1);
  CHECK(pm.table()[pm.index_of({1, 1, 2})] == doctest::Approx(1.0));

  // n=2 xor: 64-entry table, per-letter output marginal uniform
  MacChannel x = MacChannel::xor_mac();
  JointDist j2 = x.pushforward(FiniteDist::uniform(2), FiniteDist::uniform(2), 2);
  CHECK(j2.table_size() == 64);
  JointDist m3 = j2.marginal({2});
  for (int v = 0; v < 4; ++v) CHECK(m3.table()[v] == doctest::Approx(0.25));
}

TEST_CASE("chain rule and normalization properties") {
  Rng rng(42, 3);
  for (int c = 0; c < 50; ++c) {
    JointDist j = random_joint_dist({2, 3, 2}, rng);
    CHECK(j.entropy({0, 1}) ==
          doctest::Approx(j.entropy({1}) + j.conditional_entropy({0}, {1})).epsilon(1e-9));
    // marginal order does not change entropies, only indexing
    CHECK(j.entropy({0, 2}) == doctest::Approx(j.entropy({2, 0})).epsilon(1e-12));
    JointDist m = j.marginal({2, 0});
    CHECK(m.table()[m.index_of({1, 0})] ==
          doctest::Approx(j.marginal({0, 2}).table()[j.marginal({0, 2}).index_of({0, 1})]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(JointDist({2}, {0.6, 0.5}), InvalidArgumentError);
  CHECK_THROWS_AS(JointDist({2}, {-0.1, 1.1}), InvalidArgumentError);
  CHECK_THROWS_AS(MacChannel(2, 2, 2, {1.0, 0.1, 0, 1, 0, 1, 0, 1}), InvalidArgumentError);
}

TEST_CASE("memory budget is enforced") {
  CHECK_THROWS_AS(MacChannel::adder().pushforward(FiniteDist::uniform(2), FiniteDist::uniform(2), 30),
                  BudgetError);
}

TEST_CASE("json schemas") {
  // channel round trip
  MacChannel adder = MacChannel::adder();
  MacChannel back = channel_from_json(channel_to_json(adder));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 3; ++c) CHECK(back.w(a, b, c) == doctest::Approx(adder.w(a, b, c)));

  FiniteDist d = dist_from_json(Json::parse("{\"probs\":[0.25,0.75]}"));
  CHECK(d.prob(1) == doctest::Approx(0.75));
  CHECK_THROWS_AS(dist_from_json(Json::parse("{\"probs\":[0.2,0.2]}")), SchemaError);

  JointDist law = law_from_json(Json::parse("{\"arity\":[2,2],\"table\":[0.5,0,0,0.5]}"));
  CHECK(law.entropy({0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(law_from_json(Json::parse("{\"arity\":[2],\"table\":[0.5,0,0.5]}")), SchemaError);
  CHECK_THROWS_AS(channel_from_json(Json::parse("{\"in1\":2,\"in2\":2,\"out\":2}")), SchemaError);

  // partition specs, 1-based terminals
  Partition p = partition_from_spec("1|2,3", 3);
  CHECK(p.blocks.size() == 2);
  CHECK(p.blocks[0] == 0b001u);
  CHECK(p.blocks[1] == 0b110u);
  CHECK_THROWS_AS(partition_from_spec("1|2", 3), SchemaError);
  CHECK_THROWS_AS(partition_from_spec("1,2,3", 3), SchemaError);

  // ct protocol loader rejects malformed files at load time
  Json ct = Json::parse(R"({
    "n": 1, "u": [2, 2, 1], "in1": 2, "in2": 2, "out": 3,
    "restriction": "general",
    "comm": [{"msgs": []}, {"msgs": [{"sender": 1, "alphabet": 2, "table": [0, 1]}]}],
    "inputs1": [[0, 1]], "inputs2": [[0, 1]],
    "keys": {"alphabet": 2, "k1": [0, 0, 1, 1], "k2": [0, 1, 0, 1], "k3": [0, 1, 0, 1, 0, 1]}
  })");
  CHECK_NOTHROW(ct_from_json(ct));
  Json bad = ct;
  bad["restriction"] = "sometimes";
  CHECK_THROWS_AS(ct_from_json(bad), SchemaError);
  bad = ct;
  bad["inputs1"][0] = Json::array({0});
  CHECK_THROWS_AS(ct_from_json(bad), SchemaError);
}

TEST_CASE("condition removes a variable") {
  Rng rng(11, 4);
  JointDist j = random_joint_dist({2, 3}, rng);
  JointDist c0 = j.condition(0, 1);
  JointDist m = j.marginal({0});
  for (int b = 0; b < 3; ++b)
    CHECK(c0.table()[b] == doctest::Approx(j.table()[j.index_of({1, b})] / m.table()[1]).epsilon(1e-12));
}
