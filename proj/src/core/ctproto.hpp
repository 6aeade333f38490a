#ifndef SKMAC_CTPROTO_HPP
#define SKMAC_CTPROTO_HPP

#include <array>
#include <string>
#include <vector>

#include "core/dist.hpp"

namespace skmac {

enum class Restriction { kGeneral, kSe, kNic };

std::string restriction_name(Restriction r);
Restriction restriction_from_name(const std::string& s);

// One public message inside a slot's communication round. Senders are
// 1-based terminals. Table index = view * transcript_space_so_far + tid.
// Views: terminal 1 -> u1, terminal 2 -> u2, terminal 3 -> u3 * out^{t-1} +
// y3-prefix id (first output least significant).
struct CtMsg {
  int sender = 3;
  int alphabet = 2;
  std::vector<int> table;
};

struct CtSlotComm {
  std::vector<CtMsg> msgs;
};

// Key maps. Terminals 1/2 read (own randomization, transcript); terminal 3
// reads (U3, X3^n, transcript). Index layouts:
//   k1: u1 * t_space + tid
//   k2: u2 * t_space + tid
//   k3: (u3 * out^n + y3id) * t_space + tid
struct CtKeyMaps {
  int alphabet = 2;
  int target = 1;  // which estimate defines the reference key K
  std::vector<int> k1, k2, k3;
};

// Communication-transmission protocol over a two-input MAC: n slots of
// (interactive round, transmission), then a final round.
class CtProtocol {
 public:
  CtProtocol(int n, std::array<int, 3> u_alph, int in1_alph, int in2_alph, int out_alph,
             Restriction restriction, std::vector<CtSlotComm> comm, std::vector<std::vector<int>> in1_maps,
             std::vector<std::vector<int>> in2_maps, CtKeyMaps keys);

  int n() const { return n_; }
  const std::array<int, 3>& u_alph() const { return u_; }
  int in1_alph() const { return in1_; }
  int in2_alph() const { return in2_; }
  int out_alph() const { return out_; }
  Restriction restriction() const { return restr_; }
  const std::vector<CtSlotComm>& comm() const { return comm_; }
  const std::vector<std::vector<int>>& in1_maps() const { return in1_maps_; }
  const std::vector<std::vector<int>>& in2_maps() const { return in2_maps_; }
  const CtKeyMaps& keys() const { return keys_; }
  std::size_t transcript_space() const { return t_space_; }
  std::size_t transcript_space_before_inputs(int slot) const { return t_space_at_input_[slot]; }

 private:
  int n_;
  std::array<int, 3> u_;
  int in1_, in2_, out_;
  Restriction restr_;
  std::vector<CtSlotComm> comm_;
  std::vector<std::vector<int>> in1_maps_, in2_maps_;
  CtKeyMaps keys_;
  std::size_t t_space_;
  std::vector<std::size_t> t_space_at_input_;
};

// One full run of the communication-transmission protocol.
struct SkTrace {
  int u1 = 0, u2 = 0, u3 = 0;
  std::vector<int> x1, x2, x3;
  std::size_t transcript = 0;
  int k1 = 0, k2 = 0, k3 = 0;
  int key_alphabet = 1;
};

SkTrace run_protocol(const CtProtocol& p, const MacChannel& ch, std::uint64_t seed);

// Exhaustive run: every (u1,u2,u3) and every output sequence with positive
// probability, with exact path probabilities.
struct CtPath {
  double prob = 0.0;
  int u1 = 0, u2 = 0, u3 = 0;
  std::vector<int> x1, x2, x3;
  std::size_t transcript = 0;
  int k1 = 0, k2 = 0, k3 = 0;
};
std::vector<CtPath> enumerate_protocol(const CtProtocol& p, const MacChannel& ch,
                                       std::size_t max_paths = 1 << 22);

struct KeyMetrics {
  double agreement = 0.0;
  double s_in = 0.0;
  double weak_rate = 0.0;  // s_in / n
  bool exact = true;
  std::uint64_t samples = 0;
};

KeyMetrics key_metrics_exact(const CtProtocol& p, const std::vector<CtPath>& paths);
KeyMetrics key_metrics_sampled(const CtProtocol& p, const std::vector<SkTrace>& traces);

// Joint law of (Y1, Y2, Y3, K, F) with views Y1=(X1^n,U1), Y2=(X2^n,U2),
// Y3=(X3^n,U3); K is the reference key estimate.
JointDist view_law(const CtProtocol& p, const std::vector<CtPath>& paths);

// Trace law (U1, U2, U3, X3^n) for the no-input-communication rate.
JointDist nic_trace_law(const CtProtocol& p, const std::vector<CtPath>& paths);

// Trace law (X1^n, U1, X2^n, U2, X3^n, U3) for the source-emulation rate.
JointDist se_trace_law(const CtProtocol& p, const std::vector<CtPath>& paths);

// Law of (U1, U2, U3, F1, X3^n, K1, K2, K3, K) for the first-round reduction.
JointDist f1_law(const CtProtocol& p, const std::vector<CtPath>& paths, std::size_t* f1_space);

// Random protocol generators for the property suites. binary_u restricts the
// randomization alphabets to bits.
CtProtocol random_ct_protocol(Restriction r, int n, const MacChannel& ch, Rng& rng, bool binary_u = false);

}  // namespace skmac

#endif
