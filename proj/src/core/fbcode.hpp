#ifndef SKMAC_FBCODE_HPP
#define SKMAC_FBCODE_HPP

#include <memory>
#include <string>
#include <vector>

#include "core/dist.hpp"

namespace skmac {

using Bits = std::vector<std::uint8_t>;

// Causal encoder for one user: next_input is called with all outputs observed
// so far (full feedback), slot index = y_so_far.size().
class UserEncoder {
 public:
  virtual ~UserEncoder() = default;
  virtual int next_input(const std::vector<int>& y_so_far) = 0;
};

struct DecodedPair {
  Bits m1, m2;
  bool declared_failure = false;
};

// Feedback code with per-user bit-vector messages.
class FeedbackCode {
 public:
  virtual ~FeedbackCode() = default;
  virtual int block_length() const = 0;
  virtual int message_bits() const = 0;  // per user
  virtual int in1_alphabet() const = 0;
  virtual int in2_alphabet() const = 0;
  virtual int out_alphabet() const = 0;
  virtual std::unique_ptr<UserEncoder> make_encoder(int user, const Bits& msg) const = 0;
  virtual DecodedPair decode(const std::vector<int>& y) const = 0;
  virtual std::string name() const = 0;

  double rate_per_user() const { return static_cast<double>(message_bits()) / block_length(); }
};

// Two-phase feedback code for the binary adder MAC.
// Phase 1: k uncoded bits per user; output 1 is ambiguous and feedback lets
// each user resolve the other's bits. Phase 2: both users cooperatively send
// user 1's bits at the ambiguous slots over the adder used as a noiseless
// ternary channel, packing the bit string into base-3 digits.
class AdderFeedbackCode : public FeedbackCode {
 public:
  AdderFeedbackCode(int k, double slack_c);

  int block_length() const override { return k_ + n2_; }
  int message_bits() const override { return k_; }
  int in1_alphabet() const override { return 2; }
  int in2_alphabet() const override { return 2; }
  int out_alphabet() const override { return 3; }
  std::unique_ptr<UserEncoder> make_encoder(int user, const Bits& msg) const override;
  DecodedPair decode(const std::vector<int>& y) const override;
  std::string name() const override { return "adder-two-phase"; }

  int phase1_length() const { return k_; }
  int phase2_length() const { return n2_; }
  int capacity_bits() const { return j_max_; }
  double slack_c() const { return slack_c_; }

  // base-3 packing of a bit string (most significant bit first) into n2
  // digits, least significant digit first; truncates past capacity
  std::vector<int> pack_trits(const Bits& s) const;
  // inverse for j bits; empty on malformed input
  bool unpack_trits(const std::vector<int>& trits, int j, Bits& out) const;

 private:
  int k_;
  double slack_c_;
  int n2_;
  int j_max_;
};

// Phase-2 channel uses and analytic rates for the adder code.
int adder_phase2_uses(int k, double slack_c);
double adder_rate_analytic(int k, double slack_c);  // k / (k + n2), bits/use/user
// exact I(Y^n ^ M1) of one (undoubled) block, bits
double adder_code_mi_bits(int k, double slack_c);
// Hoeffding bound on phase-2 overflow probability
double adder_overflow_bound(double slack_c);
// smallest k0 <= k_limit with rate > 0.75 for every k in [k0, k_limit]; -1 if none
long long adder_k0_above_rstar(double slack_c, long long k_limit);

// Interchanges the encoder roles on even instances to equalize the two
// users' conditional output entropies (needs a symmetric channel).
std::shared_ptr<FeedbackCode> symmetrize_code(const MacChannel& ch, std::shared_ptr<const FeedbackCode> base);

// Time-division identity code: user 1 sends its bits in the first k slots,
// user 2 in the last k, the idle user sends 0. Works on any channel where
// x against 0 is decodable (XOR, adder).
class TdmaIdentityCode : public FeedbackCode {
 public:
  TdmaIdentityCode(int k, int out_alphabet);
  int block_length() const override { return 2 * k_; }
  int message_bits() const override { return k_; }
  int in1_alphabet() const override { return 2; }
  int in2_alphabet() const override { return 2; }
  int out_alphabet() const override { return out_; }
  std::unique_ptr<UserEncoder> make_encoder(int user, const Bits& msg) const override;
  DecodedPair decode(const std::vector<int>& y) const override;
  std::string name() const override { return "tdma-identity"; }

 private:
  int k_, out_;
};

struct SimulationResult {
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  std::uint64_t declared_failures = 0;
  double error_prob = 0.0;
  double ci_low = 0.0, ci_high = 1.0;  // Wilson 95%
};

// Monte Carlo error probability, deterministic given seed (per-trial derived
// seeds, order-independent reduction).
SimulationResult simulate_code(const MacChannel& ch, const FeedbackCode& code, std::uint64_t trials,
                               std::uint64_t seed, int threads = 1);

// Exact path enumeration of one code block: all message pairs and all output
// sequences with positive probability. Budget-guarded.
struct CodePath {
  double prob;
  Bits m1, m2;
  std::vector<int> y;
};
std::vector<CodePath> enumerate_code_paths(const MacChannel& ch, const FeedbackCode& code,
                                           std::size_t max_paths = 1 << 22);

// H(Y_t | M_i, Y^{t-1}) per paired slot, outputs grouped group_size at a time.
struct EntropyProfile {
  std::vector<double> given_m1;
  std::vector<double> given_m2;
};
EntropyProfile conditional_entropy_profile(const std::vector<CodePath>& paths, int group_size);

}  // namespace skmac

#endif
