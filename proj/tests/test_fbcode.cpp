#include <doctest.h>

#include <cmath>
#include <map>
#include <string>

#include "core/fbcode.hpp"
#include "core/pipeline.hpp"

using namespace skmac;

namespace {

std::vector<int> run_code(const MacChannel& ch, const FeedbackCode& code, const Bits& m1, const Bits& m2,
                          Rng& rng) {
  auto e1 = code.make_encoder(1, m1);
  auto e2 = code.make_encoder(2, m2);
  std::vector<int> y;
  for (int t = 0; t < code.block_length(); ++t) {
    int x1 = e1->next_input(y);
    int x2 = e2->next_input(y);
    y.push_back(ch.sample_output(x1, x2, rng));
  }
  return y;
}

// single-use identity code that decodes the pair from x3 alone
class IdentityOnceCode : public FeedbackCode {
 public:
  explicit IdentityOnceCode(int out) : out_(out) {}
  int block_length() const override { return 1; }
  int message_bits() const override { return 1; }
  int in1_alphabet() const override { return 2; }
  int in2_alphabet() const override { return 2; }
  int out_alphabet() const override { return out_; }
  std::string name() const override { return "identity-once"; }
  std::unique_ptr<UserEncoder> make_encoder(int, const Bits& msg) const override {
    struct E : UserEncoder {
      int bit;
      int next_input(const std::vector<int>&) override { return bit; }
    };
    auto e = std::make_unique<E>();
    e->bit = msg[0];
    return e;
  }
  DecodedPair decode(const std::vector<int>& y) const override {
    // ties go to the lowest message pair
    DecodedPair d;
    d.m1 = {static_cast<std::uint8_t>(y[0] & 1)};
    d.m2 = {0};
    return d;
  }

 private:
  int out_;
};

}  // namespace

TEST_CASE("analytic rates of the adder code") {
  double asym = 2.0 / (2.0 + 1.0 / std::log2(3.0));
  CHECK(asym == doctest::Approx(0.76018).epsilon(1e-4));
  CHECK(2.0 * asym == doctest::Approx(1.5202).epsilon(1e-4));
  CHECK(std::fabs(adder_rate_analytic(100000, 2.0) - asym) <= 0.003);

  long long k0 = adder_k0_above_rstar(2.0, 1 << 17);
  REQUIRE(k0 > 0);
  CHECK(adder_rate_analytic(static_cast<int>(k0), 2.0) > 0.75);
  CHECK(adder_rate_analytic(static_cast<int>(k0 - 1), 2.0) <= 0.75);
  for (long long k = k0; k <= (1 << 17); k += 7919)
    CHECK(adder_rate_analytic(static_cast<int>(k), 2.0) > 0.75);

  // per-block mutual information is about k bits
  CHECK(adder_code_mi_bits(1000, 3.0) == doctest::Approx(1000.0).epsilon(1e-6));
  CHECK(adder_overflow_bound(4.0) <= 2.6e-14);
}

TEST_CASE("all-zero messages have no ambiguous slots") {
  AdderFeedbackCode code(4, 1.0);
  MacChannel adder = MacChannel::adder();
  Rng rng(1, 1);
  Bits z(4, 0);
  std::vector<int> y = run_code(adder, code, z, z, rng);
  for (int t = 0; t < 4; ++t) CHECK(y[t] == 0);
  DecodedPair d = code.decode(y);
  CHECK(!d.declared_failure);
  CHECK(d.m1 == z);
  CHECK(d.m2 == z);
}

TEST_CASE("adder code round trip on random messages") {
  MacChannel adder = MacChannel::adder();
  Rng rng(7, 2);
  for (int k : {1, 2, 5, 17, 64}) {
    AdderFeedbackCode code(k, 2.0);
    for (int c = 0; c < 50; ++c) {
      Bits m1(k), m2(k);
      for (auto& b : m1) b = rng.bit() ? 1 : 0;
      for (auto& b : m2) b = rng.bit() ? 1 : 0;
      std::vector<int> y = run_code(adder, code, m1, m2, rng);
      DecodedPair d = code.decode(y);
      if (!d.declared_failure) {
        CHECK(d.m1 == m1);
        CHECK(d.m2 == m2);
      }
    }
  }
}

TEST_CASE("trit packing round trip") {
  AdderFeedbackCode code(16, 4.0);
  Rng rng(3, 3);
  for (int c = 0; c < 200; ++c) {
    int j = static_cast<int>(rng.below(code.capacity_bits() + 1));
    Bits s(j);
    for (auto& b : s) b = rng.bit() ? 1 : 0;
    Bits back;
    REQUIRE(code.unpack_trits(code.pack_trits(s), j, back));
    CHECK(back == s);
  }
}

TEST_CASE("simulated decode error on the adder MAC") {
  SimulationResult sim = simulate_code(MacChannel::adder(), AdderFeedbackCode(200, 4.0), 2000, 11, 2);
  CHECK(sim.trials == 2000);
  CHECK(sim.error_prob <= 0.01);
  CHECK(sim.ci_low <= sim.error_prob);
  CHECK(sim.ci_high >= sim.error_prob);

  // determinism across thread counts
  SimulationResult s1 = simulate_code(MacChannel::adder(), AdderFeedbackCode(50, 2.0), 500, 5, 1);
  SimulationResult s4 = simulate_code(MacChannel::adder(), AdderFeedbackCode(50, 2.0), 500, 5, 4);
  CHECK(s1.errors == s4.errors);
  CHECK(s1.declared_failures == s4.declared_failures);
}

TEST_CASE("no information flows through a constant channel") {
  std::vector<double> w(2 * 2 * 2, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) w[(a * 2 + b) * 2] = 1.0;
  MacChannel constant(2, 2, 2, std::move(w));
  SimulationResult sim = simulate_code(constant, TdmaIdentityCode(2, 2), 2000, 3, 1);
  CHECK(sim.error_prob >= 1.0 - 1.0 / 4.0 - 0.05);
}

TEST_CASE("identity single-use code on the xor MAC cannot decode the pair") {
  // decoder output (y, 0) is right only when m2 = 0
  SimulationResult sim = simulate_code(MacChannel::xor_mac(), IdentityOnceCode(2), 2000, 9, 1);
  CHECK(sim.error_prob > 0.0);
  CHECK(sim.error_prob == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("symmetrized code") {
  MacChannel adder = MacChannel::adder();
  auto sym = symmetrize_code(adder, std::make_shared<AdderFeedbackCode>(2, 1.0));
  CHECK(sym->block_length() == 8);
  CHECK(sym->message_bits() == 4);
  CHECK(symmetry_entropy_gap(adder, *sym) <= 1e-9);

  Rng rng(13, 4);
  for (int c = 0; c < 100; ++c) {
    Bits m1(4), m2(4);
    for (auto& b : m1) b = rng.bit() ? 1 : 0;
    for (auto& b : m2) b = rng.bit() ? 1 : 0;
    std::vector<int> y = run_code(adder, *sym, m1, m2, rng);
    DecodedPair d = sym->decode(y);
    CHECK(!d.declared_failure);
    CHECK(d.m1 == m1);
    CHECK(d.m2 == m2);
  }

  auto sym_x = symmetrize_code(MacChannel::xor_mac(), std::make_shared<TdmaIdentityCode>(2, 2));
  CHECK(symmetry_entropy_gap(MacChannel::xor_mac(), *sym_x) <= 1e-9);

  // noisy symmetric channel: the identity holds with genuine channel noise
  MacChannel noisy = MacChannel::noisy_adder(0.05);
  auto sym_n = symmetrize_code(noisy, std::make_shared<TdmaIdentityCode>(1, 3));
  CHECK(symmetry_entropy_gap(noisy, *sym_n) <= 1e-9);

  // asymmetric channel rejected: output copies input 1
  std::vector<double> w(2 * 2 * 2, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) w[(a * 2 + b) * 2 + a] = 1.0;
  MacChannel asym(2, 2, 2, std::move(w));
  CHECK_THROWS_AS(symmetrize_code(asym, std::make_shared<TdmaIdentityCode>(2, 2)), InvalidArgumentError);
}

TEST_CASE("analytic block mutual information matches enumeration") {
  // I(Y; M1) = H(Y) - H(Y|M1) over all message pairs, including a phase-2
  // budget small enough to truncate (k=4, c=0)
  MacChannel adder = MacChannel::adder();
  for (auto [k, c] : {std::pair{1, 1.0}, std::pair{2, 1.0}, std::pair{3, 0.0}, std::pair{4, 0.0}}) {
    AdderFeedbackCode code(k, c);
    auto paths = enumerate_code_paths(adder, code);
    std::map<std::string, double> py, pmy;
    for (const auto& p : paths) {
      std::string y(p.y.begin(), p.y.end());
      std::string my(p.m1.begin(), p.m1.end());
      my += '|';
      my += y;
      py[y] += p.prob;
      pmy[my] += p.prob;
    }
    double h_y = 0.0, h_my = 0.0;
    for (auto& [s, v] : py) h_y -= xlog2x(v);
    for (auto& [s, v] : pmy) h_my -= xlog2x(v);
    double mi_enum = h_y - (h_my - k);  // H(M1) = k bits
    CHECK(adder_code_mi_bits(k, c) == doctest::Approx(mi_enum).epsilon(1e-9));
  }
}

TEST_CASE("conditional entropy profile of the symmetrized adder code") {
  MacChannel adder = MacChannel::adder();
  auto sym = symmetrize_code(adder, std::make_shared<AdderFeedbackCode>(2, 1.0));
  auto paths = enumerate_code_paths(adder, *sym);
  EntropyProfile prof = conditional_entropy_profile(paths, 2);
  REQUIRE(prof.given_m1.size() == 4);
  // phase-1 paired slots carry two fresh bits of the other message
  CHECK(prof.given_m1[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(prof.given_m1[1] == doctest::Approx(2.0).epsilon(1e-9));
  // phase-2 paired slots are deterministic given one message and the past
  CHECK(prof.given_m1[2] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(prof.given_m1[3] == doctest::Approx(0.0).epsilon(1e-9));
}
