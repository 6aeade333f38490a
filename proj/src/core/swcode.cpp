#include "core/swcode.hpp"

#include <cmath>

namespace skmac {

SwSlotCode::SwSlotCode(int stat_bits_per_block, int blocks, double cond_entropy_bits, double slack_bits,
                       std::uint64_t seed)
    : d_(stat_bits_per_block), n_(blocks), h_(cond_entropy_bits) {
  if (d_ < 0 || n_ < 1) throw InvalidArgumentError("SwSlotCode: bad dimensions");
  if (slack_bits < 0.0) throw InvalidArgumentError("SwSlotCode: negative slack");
  if (h_ < -1e-12 || h_ > d_ + 1e-9) throw InvalidArgumentError("SwSlotCode: entropy outside [0, d]");
  // deterministic slots need no communication
  rows_ = (h_ > 1e-9) ? static_cast<int>(std::ceil(n_ * (h_ + slack_bits) - 1e-12)) : 0;
  if (rows_ > 0) {
    Rng rng(seed, 0x5707);
    a_ = BitMat::random(rows_, input_bits(), rng);
    id_solver_ = std::make_unique<Gf2Solver>(a_);
  }
}

int SwSlotCode::leak_rank() const { return id_solver_ ? id_solver_->rank() : 0; }

BitVec SwSlotCode::bin(const BitVec& stats) const {
  if (stats.size() != input_bits()) throw InvalidArgumentError("SwSlotCode::bin: size mismatch");
  if (rows_ == 0) return BitVec(0);
  return a_.mul(stats);
}

SwSlotCode::Outcome SwSlotCode::decode_offset(const BitVec& bin_msg, const BitVec& offset, BitVec& u) const {
  if (rows_ == 0) {
    u = BitVec(input_bits());
    return Outcome::kOk;  // caller reconstructs deterministically
  }
  BitVec rhs = bin_msg;
  rhs ^= a_.mul(offset);
  BitVec sol;
  Gf2Solver::Status st = id_solver_->solve(rhs, sol);
  if (st == Gf2Solver::Status::kInconsistent) return Outcome::kInconsistent;
  u = sol;
  return st == Gf2Solver::Status::kUnique ? Outcome::kOk : Outcome::kAmbiguous;
}

SwSlotCode::Outcome SwSlotCode::decode_affine(const BitVec& bin_msg, const BitMat& m, const BitVec& c,
                                              BitVec& u) const {
  if (rows_ == 0) {
    u = BitVec(m.cols());
    return Outcome::kOk;
  }
  BitVec rhs = bin_msg;
  rhs ^= a_.mul(c);
  BitMat am = a_.mul(m);
  Gf2Solver solver(am);
  BitVec sol;
  Gf2Solver::Status st = solver.solve(rhs, sol);
  if (st == Gf2Solver::Status::kInconsistent) return Outcome::kInconsistent;
  u = sol;
  return st == Gf2Solver::Status::kUnique ? Outcome::kOk : Outcome::kAmbiguous;
}

std::optional<std::vector<int>> SwSlotCode::decode_exhaustive(
    const BitVec& bin_msg, const std::vector<std::vector<std::pair<double, BitVec>>>& cands,
    std::size_t budget) const {
  if (static_cast<int>(cands.size()) != n_) throw InvalidArgumentError("decode_exhaustive: block count mismatch");
  double log_total = 0.0;
  for (const auto& c : cands) {
    if (c.empty()) return std::nullopt;
    log_total += std::log2(static_cast<double>(c.size()));
  }
  if (log_total > std::log2(static_cast<double>(budget)))
    throw BudgetError("decode_exhaustive: candidate space too large");

  std::vector<int> pick(n_, 0), best;
  double best_prob = -1.0;
  BitVec stats(input_bits());
  for (;;) {
    // assemble and test this combination
    double prob = 1.0;
    for (int b = 0; b < n_; ++b) {
      prob *= cands[b][pick[b]].first;
      const BitVec& s = cands[b][pick[b]].second;
      for (int i = 0; i < d_; ++i) stats.set(b * d_ + i, s.get(i));
    }
    if (prob > 0.0 && bin(stats) == bin_msg && prob > best_prob) {
      best_prob = prob;
      best = pick;
    }
    int b = n_ - 1;
    while (b >= 0) {
      if (++pick[b] < static_cast<int>(cands[b].size())) break;
      pick[b] = 0;
      --b;
    }
    if (b < 0) break;
  }
  if (best_prob < 0.0) return std::nullopt;
  return best;
}

}  // namespace skmac
