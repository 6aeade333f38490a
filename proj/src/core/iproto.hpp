#ifndef SKMAC_IPROTO_HPP
#define SKMAC_IPROTO_HPP

#include <cstdint>
#include <vector>

#include "core/dist.hpp"
#include "core/partition.hpp"

namespace skmac {

// One public message: a deterministic function of the sender's observation
// and everything sent before it. Table index = obs * prior_space + tid where
// tid is the mixed-radix id of prior messages (first message least
// significant).
struct IMsg {
  int sender = 0;  // 0-based terminal
  int alphabet = 2;
  std::vector<int> table;
};

// Deterministic multi-terminal interactive communication over observations
// Y_1..Y_m. The message order is the schedule.
class InteractiveProtocol {
 public:
  InteractiveProtocol(int m, std::vector<int> obs_alphabets, std::vector<IMsg> msgs);

  int m() const { return m_; }
  const std::vector<int>& obs_alphabets() const { return obs_alph_; }
  const std::vector<IMsg>& messages() const { return msgs_; }
  std::size_t transcript_space() const { return t_space_; }

  // transcript id for one observation tuple
  std::size_t run(const std::vector<int>& obs) const;

 private:
  int m_;
  std::vector<int> obs_alph_;
  std::vector<IMsg> msgs_;
  std::size_t t_space_;
};

// A transcript variable built directly from a table over observation tuples.
// Not an interactive communication; used for negative controls.
struct DirectTranscript {
  int alphabet = 2;
  std::vector<int> table;  // row-major over obs tuples, last variable fastest
};

// Joint law of (Y_1..Y_m, F) with F re-indexed to the reached transcripts.
struct TranscriptLaw {
  JointDist law;                          // vars 0..m-1 = Y, var m = F
  std::vector<std::size_t> dense_to_tid;  // reached transcript ids
};

TranscriptLaw transcript_law(const InteractiveProtocol& proto, const JointDist& src);
TranscriptLaw transcript_law(const DirectTranscript& tr, const JointDist& src);

struct InteractiveCheck {
  double lhs = 0.0;  // H(F)
  double rhs = 0.0;  // sum_B lambda_B H(F | Y_{B^c})
  bool holds = false;
};

InteractiveCheck check_interactive_inequality(const InteractiveProtocol& proto, const JointDist& src,
                                              const FractionalPartition& lam);
InteractiveCheck check_interactive_inequality(const DirectTranscript& tr, const JointDist& src,
                                              const FractionalPartition& lam);

// Max over transcript values f of D(P_{Y|f} || prod_i P_{Yi|f}), bits.
// src must be a product law (within 1e-9).
double check_factorization(const InteractiveProtocol& proto, const JointDist& src);
double check_factorization(const DirectTranscript& tr, const JointDist& src);

// Random generators for property suites.
InteractiveProtocol random_interactive_protocol(int m, int max_obs_alphabet, int max_rounds, Rng& rng,
                                                const std::vector<int>& obs_alphabets);
JointDist random_joint_dist(const std::vector<int>& arity, Rng& rng);
JointDist random_product_dist(const std::vector<int>& arity, Rng& rng);

}  // namespace skmac

#endif
