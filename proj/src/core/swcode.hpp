#ifndef SKMAC_SWCODE_HPP
#define SKMAC_SWCODE_HPP

#include <memory>
#include <optional>
#include <vector>

#include "core/gf2.hpp"

namespace skmac {

// Slepian-Wolf step for one slot: seeded random linear binning of the
// per-block sufficient statistics (d bits per block, N blocks) at rate
// ceil(N (H + slack)) bits; deterministic slots send nothing.
class SwSlotCode {
 public:
  SwSlotCode(int stat_bits_per_block, int blocks, double cond_entropy_bits, double slack_bits,
             std::uint64_t seed);

  int rows() const { return rows_; }
  int input_bits() const { return d_ * n_; }
  double declared_entropy() const { return h_; }
  double rate_per_block() const { return n_ ? static_cast<double>(rows_) / n_ : 0.0; }
  const BitMat& matrix() const { return a_; }
  // rank of the bin map; with uniform statistics this is H(F_t) in bits
  int leak_rank() const;

  BitVec bin(const BitVec& stats) const;

  enum class Outcome { kOk, kAmbiguous, kInconsistent };

  // Unknown bits u with stats = u xor offset (identity statistic model, the
  // common case). Solver factorized once.
  Outcome decode_offset(const BitVec& bin_msg, const BitVec& offset, BitVec& u) const;

  // General affine model stats = M u + c.
  Outcome decode_affine(const BitVec& bin_msg, const BitMat& m, const BitVec& c, BitVec& u) const;

  // Exhaustive max-probability decoding inside the bin over the product of
  // per-block candidate lists (probability, statistic bits). Ties go to the
  // lowest candidate-index vector. Budget-guarded.
  std::optional<std::vector<int>> decode_exhaustive(
      const BitVec& bin_msg, const std::vector<std::vector<std::pair<double, BitVec>>>& cands,
      std::size_t budget = 1 << 20) const;

 private:
  int d_, n_, rows_;
  double h_;
  BitMat a_;
  std::unique_ptr<Gf2Solver> id_solver_;  // for the identity statistic model
};

}  // namespace skmac

#endif
